// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copygen::quality {

using Tokens = std::vector<std::string>;

enum class Smoothing { none, add_one };

/// Clipped n-gram matches and candidate n-gram totals for n = 1..4, plus
/// lengths for the brevity penalty. Additive, so corpus scores sum these.
struct BleuStats {
  std::size_t matches[4] = {0, 0, 0, 0};
  std::size_t totals[4] = {0, 0, 0, 0};
  std::size_t candidate_length = 0;
  std::size_t reference_length = 0;

  BleuStats& operator+=(const BleuStats& other);
};

/// Reference length used is the one closest to the candidate (shorter wins ties).
BleuStats bleu_stats(const Tokens& candidate, std::span<const Tokens> references);

/// Geometric mean of modified precisions 1..max_n times the brevity penalty.
/// With add_one, orders n >= 2 without any match use (0 + 1) / (total + 1).
double bleu_from_stats(const BleuStats& stats, std::size_t max_n, Smoothing smoothing = Smoothing::add_one);

/// Throws no_reference without references, config_error unless 1 <= max_n <= 4.
double bleu(const Tokens& candidate, std::span<const Tokens> references, std::size_t max_n = 4,
            Smoothing smoothing = Smoothing::add_one);

/// Lowercased ASCII, punctuation and CJK characters split into their own tokens.
Tokens standard_tokenize(std::string_view text);

/// BLEU-4 with add-one smoothing over standard_tokenize.
double sacre_bleu(std::string_view candidate, std::span<const std::string> references);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

enum class RougeVariant { rouge1, rouge2, rougeL };

/// Throws empty_reference for an empty reference.
Prf rouge(const Tokens& candidate, const Tokens& reference, RougeVariant variant);

struct MeteorResult {
  std::size_t matches = 0;
  std::size_t chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f_mean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
  /// False when the alignment came from the greedy fallback.
  bool exact = true;
};

/// Exact-match unigram alignment with the most matches and, among those, the
/// fewest chunks. Searches exhaustively within `search_budget` states and
/// falls back to a left-to-right greedy alignment beyond it.
MeteorResult meteor_lite_detail(const Tokens& candidate, const Tokens& reference,
                                std::size_t search_budget = 200000);
double meteor_lite(const Tokens& candidate, const Tokens& reference);

/// Chunk count of a given alignment: `align[i]` is the reference position of
/// candidate token i, or -1.
std::size_t count_chunks(const std::vector<long>& align);

}  // namespace copygen::quality
