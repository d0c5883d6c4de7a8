// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <string_view>

#include "copygen/corpus/tokenizer.hpp"
#include "copygen/corpus/vocab.hpp"
#include "copygen/quality/adaboost.hpp"
#include "copygen/quality/filters.hpp"

namespace copygen::quality {

enum GrammarFeature : std::size_t {
  kLength = 0,
  kTypeTokenRatio,
  kMaxRepeatRun,
  kRepeatedBigramRatio,
  kPunctuationDensity,
  kOovFraction,
  kMeanSentenceLength,
  kGrammarFeatureCount
};

inline constexpr std::array<std::string_view, kGrammarFeatureCount> kGrammarFeatureNames = {
    "length", "type_token_ratio", "max_repeat_run", "repeated_bigram_ratio",
    "punctuation_density", "oov_fraction", "mean_sentence_length"};

/// Fixed-order surface features. Punctuation density is punctuation code
/// points over non-space code points; the OOV fraction is 0 without a vocab.
FeatureVector grammar_features(std::string_view text, const corpus::Vocab* vocab = nullptr,
                               corpus::TokenizeMode mode = corpus::TokenizeMode::whitespace);

/// Rejects with reason "grammar" when the ensemble margin is below
/// `threshold`. Throws empty_ensemble for an ensemble without stumps.
FilterVerdict grammar_filter(std::string_view description, const StumpEnsemble& ensemble, double threshold,
                             const corpus::Vocab* vocab = nullptr,
                             corpus::TokenizeMode mode = corpus::TokenizeMode::whitespace);

}  // namespace copygen::quality
