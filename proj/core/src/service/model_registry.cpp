// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/model_registry.hpp"

#include <fstream>

#include "copygen/error.hpp"
#include "copygen/service/journal.hpp"

namespace copygen::service {

ModelRegistry::ModelRegistry(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string ModelRegistry::publish(const model::ModelParams& params, const corpus::Vocab& vocab) {
  const auto staging = dir_ / "staging.apcg";
  model::save_model(params, vocab, staging);
  const auto version = model::checkpoint_version(staging);
  const auto target = dir_ / (version + ".apcg");
  std::filesystem::rename(model::vocab_path_for(staging), model::vocab_path_for(target));
  std::filesystem::rename(staging, target);
  activate(version);
  return version;
}

void ModelRegistry::activate(const std::string& version) {
  const auto file = version + ".apcg";
  if (!std::filesystem::exists(dir_ / file)) throw Error("unknown_model", "no checkpoint " + file + " in registry");
  write_file_atomic(dir_ / "CURRENT", file + "\n");
}

std::optional<std::filesystem::path> ModelRegistry::current_path() const {
  std::ifstream in(dir_ / "CURRENT");
  std::string name;
  if (!in || !std::getline(in, name) || name.empty()) return std::nullopt;
  return dir_ / name;
}

std::shared_ptr<const model::LoadedModel> ModelRegistry::load_current() const {
  const auto path = current_path();
  if (!path) throw Error("model_unavailable", "registry " + dir_.string() + " has no current model");
  return std::make_shared<const model::LoadedModel>(model::load_model(*path));
}

bool ModelRegistry::refresh(ModelHandle& handle) const {
  const auto path = current_path();
  if (!path) return false;
  // File names are versions, so the pointer alone tells whether to reload.
  if (path->stem().string() == handle.version()) return false;
  handle.install(load_current());
  return true;
}

}  // namespace copygen::service
