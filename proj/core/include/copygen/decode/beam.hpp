// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "copygen/decode/predictor.hpp"

namespace copygen::decode {

struct Hypothesis {
  /// Starts with the BOS id.
  std::vector<TokenId> tokens;
  double log_prob = 0.0;
  bool finished = false;
  double score = 0.0;

  /// Generated tokens, BOS excluded.
  std::size_t length() const noexcept { return tokens.empty() ? 0 : tokens.size() - 1; }
};

struct BeamConfig {
  std::size_t beam_size = 4;
  std::size_t max_len = 128;
  double length_alpha = 0.7;
  bool no_repeat_trigram = false;
  TokenId bos = corpus::kBos;
  TokenId eos = corpus::kEos;
};

/// logprob / length^alpha.
double normalized_score(double log_prob, std::size_t length, double alpha);

/// Returns the k best next tokens after `prefix`.
using StepFn = std::function<std::vector<Candidate>(std::span<const TokenId> prefix, std::size_t k)>;

/// Beam search over an arbitrary step function. `vocab_size` bounds k.
/// `steps` receives the number of expansion rounds run.
std::vector<Hypothesis> beam_search(const StepFn& step, std::size_t vocab_size, const BeamConfig& config,
                                    std::size_t* steps = nullptr);

/// Beam search through the decoder predictor.
std::vector<Hypothesis> beam_search(Predictor& predictor, const EncodedSource& encoded, const BeamConfig& config,
                                    std::size_t* steps = nullptr);

/// Argmax decoding through the decoder predictor.
Hypothesis greedy_decode(Predictor& predictor, const EncodedSource& encoded, std::size_t max_len);

/// Beam search that calls the network directly, sorting the full
/// distribution at each step, without going through a Predictor.
std::vector<Hypothesis> beam_search_monolithic(const model::ModelParams& params, const model::SourceIds& source,
                                               const BeamConfig& config);

/// Surface tokens of a hypothesis with BOS/EOS removed.
std::vector<std::string> surface_tokens(const corpus::Vocab& vocab, const model::SourceIds& source,
                                        const Hypothesis& hyp);

}  // namespace copygen::decode
