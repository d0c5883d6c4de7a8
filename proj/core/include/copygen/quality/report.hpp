// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copygen/quality/metrics.hpp"

namespace copygen::quality {

/// Scores in [0, 1], in table column order.
struct MetricScores {
  double sacre_bleu = 0.0;
  double rouge1 = 0.0;
  double rouge2 = 0.0;
  double rougeL = 0.0;
  double bleu[4] = {0.0, 0.0, 0.0, 0.0};
  double meteor = 0.0;

  std::array<double, 9> columns() const;
};

inline constexpr std::array<std::string_view, 9> kMetricColumns = {
    "SacreBLEU", "ROUGE-1", "ROUGE-2", "ROUGE-L", "BLEU-1", "BLEU-2", "BLEU-3", "BLEU-4", "Meteor"};

struct MetricRow {
  std::string model;
  /// BLEU columns aggregate n-gram counts over the corpus; ROUGE and Meteor
  /// are means of the item scores.
  MetricScores corpus;
  std::vector<MetricScores> items;
};

/// Scores one item. `candidate`/`reference` are raw texts for SacreBLEU and
/// the token lists for everything else.
MetricScores score_item(std::string_view candidate_text, const Tokens& candidate, std::string_view reference_text,
                        const Tokens& reference);

/// Throws shape_error when the lists differ in length or are empty.
MetricRow evaluate_corpus(std::string model, std::span<const std::string> candidate_texts,
                          std::span<const Tokens> candidates, std::span<const std::string> reference_texts,
                          std::span<const Tokens> references);

/// Header plus one line per row, values x100 with two decimals.
std::string format_table(std::span<const MetricRow> rows, char delimiter = '\t');

}  // namespace copygen::quality
