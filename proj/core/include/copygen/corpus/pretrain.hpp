// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "copygen/corpus/document.hpp"
#include "copygen/numerics/rng.hpp"

namespace copygen::corpus {

enum class Objective { sentence_reordering, pseudo_summary, finetune };

std::string to_string(Objective objective);
Objective parse_objective(const std::string& name);

/// A source/target pair for sequence-to-sequence pre-training, with the
/// bookkeeping needed to audit how it was built.
struct PretrainExample {
  std::vector<std::string> input;
  std::vector<std::string> target;
  /// Sentence lengths in token order, so both sides can be re-segmented.
  std::vector<std::size_t> input_sentence_lengths;
  std::vector<std::size_t> target_sentence_lengths;
  Objective objective = Objective::sentence_reordering;

  std::string document_id;
  std::uint64_t seed = 0;
  /// Reordering: input sentence i is original sentence permutation[i].
  std::vector<std::size_t> permutation;
  /// Pseudo summary: indices (ascending) of the selected short part.
  std::vector<std::size_t> selected;
  std::vector<std::size_t> remainder;
  std::size_t selection_score = 0;
  bool exact_selection = false;
};

/// Splits a flat token list back into sentences.
std::vector<Sentence> segment(const std::vector<std::string>& tokens, const std::vector<std::size_t>& lengths);

/// Shuffled-sentence input, original-order target. The permutation is drawn
/// uniformly among non-identity permutations (identity draws are resampled).
PretrainExample make_sr_example(const Document& doc, std::uint64_t seed);

/// max(1, round-half-up(m / 4)).
std::size_t psg_selection_size(std::size_t m);

struct PsgConfig {
  /// Default conditions on the selected short part and generates the rest;
  /// `reverse` swaps input and target.
  bool reverse = false;
  /// Exhaustive search is used while C(m, k) stays within this bound.
  std::size_t exact_subset_limit = 4096;
};

/// Selects k sentences maximising token-LCS between the selected and the
/// remaining concatenations (ties: lexicographically smallest index set).
PretrainExample make_psg_example(const Document& doc, const PsgConfig& config = {});

/// Pre-training corpus files: one JSON object per line with keys
/// input, target, objective, meta.
void write_pretrain_examples(const std::filesystem::path& path, const std::vector<PretrainExample>& examples);
std::vector<PretrainExample> read_pretrain_examples(const std::filesystem::path& path);

}  // namespace copygen::corpus
