// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/description_store.hpp"

#include <fstream>
#include <sstream>

#include "copygen/error.hpp"

namespace copygen::service {
namespace {

constexpr const char* kSnapshot = "store.snapshot";
constexpr const char* kJournal = "store.journal";

DescriptionStore::Key key_of(const GenerationArtifact& a) { return {a.sku, a.model_version}; }

}  // namespace

DescriptionStore::DescriptionStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  auto map = std::make_shared<Map>();
  // The snapshot is one artifact per line, written atomically, so it has no torn tail.
  if (std::ifstream in(dir_ / kSnapshot); in) {
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) {
        auto a = artifact_from_json(line);
        (*map)[key_of(a)] = std::move(a);
      }
  }
  auto replay = replay_journal(dir_ / kJournal);
  torn_bytes_ = replay.torn_bytes;
  for (const auto& payload : replay.payloads) {
    auto a = artifact_from_json(payload);
    (*map)[key_of(a)] = std::move(a);
  }
  current_ = std::move(map);
  journal_ = std::make_unique<JournalWriter>(dir_ / kJournal);
}

void DescriptionStore::put(const GenerationArtifact& artifact) {
  if (artifact.state != ScreeningState::approved)
    throw Error("not_approved", "only approved artifacts are stored: " + artifact.id);
  std::lock_guard lock(write_mu_);
  journal_->append(to_json(artifact));
  auto next = std::make_shared<Map>(*std::atomic_load(&current_));
  (*next)[key_of(artifact)] = artifact;
  std::atomic_store(&current_, std::shared_ptr<const Map>(std::move(next)));
}

std::optional<GenerationArtifact> DescriptionStore::get(const std::string& sku,
                                                        const std::string& model_version) const {
  const auto snap = snapshot();
  auto it = snap->find({sku, model_version});
  if (it == snap->end()) return std::nullopt;
  return it->second;
}

std::shared_ptr<const DescriptionStore::Map> DescriptionStore::snapshot() const { return std::atomic_load(&current_); }

void DescriptionStore::compact() {
  std::lock_guard lock(write_mu_);
  const auto snap = snapshot();
  std::string content;
  for (const auto& [key, artifact] : *snap) content += to_json(artifact) + '\n';
  // A crash between these two steps replays journal entries already in the
  // snapshot, which is harmless because puts are idempotent per key.
  write_file_atomic(dir_ / kSnapshot, content);
  journal_->reset();
}

}  // namespace copygen::service
