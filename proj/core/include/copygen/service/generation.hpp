// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "copygen/corpus/record.hpp"
#include "copygen/decode/beam.hpp"
#include "copygen/quality/adaboost.hpp"
#include "copygen/quality/filters.hpp"
#include "copygen/service/catalog.hpp"
#include "copygen/service/clock.hpp"
#include "copygen/service/event_log.hpp"
#include "copygen/service/model_handle.hpp"
#include "copygen/service/screening.hpp"

namespace copygen::service {

struct GenerateRequest {
  std::optional<std::string> sku;
  std::optional<corpus::ProductRecord> record;
  std::optional<std::size_t> beam_size;
  std::optional<std::size_t> max_len;
};

struct ServiceOptions {
  decode::BeamConfig beam;
  corpus::LinearizeConfig linearize;
  quality::TermLexicon lexicon;
  /// Grammar screening is skipped when empty.
  quality::StumpEnsemble grammar;
  double grammar_threshold = 0.0;
  /// When false a category without a lexicon is not by itself a rejection.
  bool require_lexicon = false;
  /// Put filter-passing model outputs straight into the screening queue.
  bool auto_submit = true;
  std::size_t max_beam_size = 16;
  std::size_t max_len_limit = 256;
};

struct BatchSummary {
  std::size_t requested = 0;
  std::size_t cached = 0;
  std::size_t rejected = 0;
  std::size_t enqueued = 0;
  std::size_t errored = 0;
  std::vector<std::string> artifact_ids;
  std::vector<std::pair<std::string, std::string>> errors;
};

struct ServiceStats {
  std::uint64_t requests = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t model_invocations = 0;
  std::optional<double> acceptance_rate_today;
  std::optional<double> ctr;
  std::optional<double> cvr;
  double cache_hit_rate() const {
    return requests == 0 ? 0.0 : static_cast<double>(cache_hits) / static_cast<double>(requests);
  }
};

/// Cache lookup, generation, filtering and screening hand-off.
class GenerationService {
 public:
  GenerationService(Catalog& catalog, ModelHandle& model, DescriptionStore& store, ScreeningBoard& board,
                    EventLog& events, ServiceOptions options, Clock clock = system_clock());

  /// Throws unknown_product, model_unavailable, config_error.
  GenerationArtifact generate(const GenerateRequest& request);
  BatchSummary batch_generate(const std::vector<std::string>& skus);

  /// Approved artifact for the sku under the serving model version.
  std::optional<GenerationArtifact> approved_description(const std::string& sku) const;

  ServiceStats stats() const;
  /// Number of encoder passes run; a cache hit never adds to it.
  std::uint64_t model_invocations() const noexcept { return model_invocations_.load(); }

  ScreeningBoard& board() noexcept { return board_; }
  EventLog& events() noexcept { return events_; }
  ModelHandle& model() noexcept { return model_; }
  Catalog& catalog() noexcept { return catalog_; }

 private:
  corpus::ProductRecord resolve(const GenerateRequest& request) const;
  std::string next_id();

  Catalog& catalog_;
  ModelHandle& model_;
  DescriptionStore& store_;
  ScreeningBoard& board_;
  EventLog& events_;
  ServiceOptions options_;
  Clock clock_;
  std::atomic<std::uint64_t> requests_{0};
  std::atomic<std::uint64_t> cache_hits_{0};
  std::atomic<std::uint64_t> model_invocations_{0};
  std::atomic<std::uint64_t> id_counter_{0};
  std::string id_prefix_;
};

}  // namespace copygen::service
