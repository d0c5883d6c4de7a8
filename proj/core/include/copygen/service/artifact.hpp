// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "copygen/quality/filters.hpp"

namespace copygen::service {

enum class Provenance { cache, model };
enum class ScreeningState { pending, approved, rejected };

std::string_view to_string(Provenance p);
std::string_view to_string(ScreeningState s);
ScreeningState parse_screening_state(std::string_view name);

struct ScoredCandidate {
  std::string text;
  double score = 0.0;
  double log_prob = 0.0;

  friend bool operator==(const ScoredCandidate&, const ScoredCandidate&) = default;
};

struct GenerationArtifact {
  std::string id;
  std::string sku;
  std::string text;
  std::vector<ScoredCandidate> candidates;
  Provenance provenance = Provenance::model;
  std::string model_version;
  quality::FilterVerdict verdict;
  ScreeningState state = ScreeningState::pending;
  std::optional<std::string> edited_text;
  std::int64_t created_ms = 0;
  std::optional<std::int64_t> reviewed_ms;
  double latency_ms = 0.0;

  /// Edited text if the reviewer changed it, else the generated text.
  const std::string& final_text() const { return edited_text ? *edited_text : text; }

  friend bool operator==(const GenerationArtifact&, const GenerationArtifact&) = default;
};

std::string to_json(const GenerationArtifact& artifact);
GenerationArtifact artifact_from_json(const std::string& text);

}  // namespace copygen::service
