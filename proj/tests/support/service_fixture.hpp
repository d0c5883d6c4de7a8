// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// A tiny catalog, a model trained on it in memory, and a fully wired
// generation service over a temporary directory.

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "copygen/corpus/record.hpp"
#include "copygen/model/checkpoint.hpp"
#include "copygen/model/trainer.hpp"
#include "copygen/service/generation.hpp"
#include "support/toy.hpp"

namespace copygen::testing {

inline corpus::ProductRecord toy_product(std::size_t i) {
  static const char* kinds[] = {"phone", "tablet", "watch", "speaker"};
  static const char* colors[] = {"black", "silver", "blue"};
  corpus::ProductRecord r;
  r.sku = "sku-" + std::to_string(i);
  const std::string kind = kinds[i % 4], color = colors[i % 3];
  r.title = color + " " + kind + " m" + std::to_string(i);
  r.attributes = {{"battery", std::to_string(3000 + 500 * (i % 5)) + "mAh"}, {"color", color}};
  r.category = "electronics";
  r.description = "a " + color + " " + kind + " with " + r.attributes[0].value + " battery .";
  return r;
}

inline std::vector<corpus::ProductRecord> toy_products(std::size_t n) {
  std::vector<corpus::ProductRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(toy_product(i));
  return out;
}

/// Trains on (record, target text) pairs. Targets default to the records'
/// descriptions; `targets` overrides them to plant a specific output.
inline std::shared_ptr<const model::LoadedModel> train_toy_service_model(
    const std::vector<corpus::ProductRecord>& records, const std::string& version, std::size_t epochs = 60,
    std::vector<std::string> targets = {}) {
  if (targets.empty())
    for (const auto& r : records) targets.push_back(*r.description);
  std::vector<std::vector<std::string>> sources, target_tokens, all;
  for (std::size_t i = 0; i < records.size(); ++i) {
    sources.push_back(corpus::linearize_product(records[i]));
    target_tokens.push_back(corpus::tokenize(targets[i], corpus::TokenizeMode::whitespace));
    all.push_back(sources.back());
    all.push_back(target_tokens.back());
  }
  auto vocab = corpus::Vocab::build(all, 1, 1000);
  std::vector<model::TrainExample> data;
  for (std::size_t i = 0; i < records.size(); ++i)
    data.push_back(model::make_example(vocab, sources[i], target_tokens[i]));
  model::TrainHyper hyper;
  hyper.epochs = epochs;
  hyper.batch_size = 4;
  hyper.adam.learning_rate = 3e-3;
  auto config = toy_config(vocab.size(), 32, 2);
  auto result = model::train(config, data, corpus::Objective::finetune, hyper, 7);
  return std::make_shared<const model::LoadedModel>(
      model::LoadedModel{std::move(result.params), std::move(vocab), version});
}

/// Everything a GenerationService needs, owned in one place.
struct ServiceRig {
  std::filesystem::path dir;
  std::int64_t now_ms = 1'700'000'000'000;
  service::Catalog catalog;
  service::ModelHandle handle;
  std::unique_ptr<service::DescriptionStore> store;
  std::unique_ptr<service::ScreeningBoard> board;
  service::EventLog events;
  std::unique_ptr<service::GenerationService> service;

  ServiceRig(const std::string& name, const std::vector<corpus::ProductRecord>& products,
             std::shared_ptr<const model::LoadedModel> model, service::ServiceOptions options = {})
      : dir(std::filesystem::temp_directory_path() / name), catalog(products), handle(std::move(model)) {
    std::filesystem::remove_all(dir);
    store = std::make_unique<service::DescriptionStore>(dir / "store");
    board = std::make_unique<service::ScreeningBoard>(*store, clock(), dir / "audit.journal");
    if (options.beam.max_len == decode::BeamConfig{}.max_len) options.beam.max_len = 24;
    service = std::make_unique<service::GenerationService>(catalog, handle, *store, *board, events, std::move(options),
                                                           clock());
  }
  ~ServiceRig() {
    service.reset();
    board.reset();
    store.reset();
    std::filesystem::remove_all(dir);
  }

  service::Clock clock() {
    return [this] { return now_ms; };
  }
};

}  // namespace copygen::testing
