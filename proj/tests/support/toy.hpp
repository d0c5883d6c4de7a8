// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Small synthetic vocabularies, copy-task pairs and model configurations
// shared by the unit and acceptance tests.

#include <string>
#include <vector>

#include "copygen/corpus/vocab.hpp"
#include "copygen/model/trainer.hpp"
#include "copygen/numerics/rng.hpp"

namespace copygen::testing {

/// Specials followed by "w0".."w{n-1}".
inline corpus::Vocab toy_vocab(std::size_t words) {
  std::vector<std::string> tokens(corpus::kSpecialTokens.begin(), corpus::kSpecialTokens.end());
  for (std::size_t i = 0; i < words; ++i) tokens.push_back("w" + std::to_string(i));
  return corpus::Vocab::from_tokens(std::move(tokens));
}

inline std::vector<std::string> random_words(numerics::Rng& rng, std::size_t words, std::size_t min_len,
                                             std::size_t max_len) {
  const std::size_t len = min_len + rng.below(max_len - min_len + 1);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < len; ++i) out.push_back("w" + std::to_string(rng.below(words)));
  return out;
}

/// `count` pairs whose target equals the source.
inline std::vector<model::TrainExample> copy_task(const corpus::Vocab& vocab, std::size_t words, std::size_t count,
                                                  std::size_t min_len, std::size_t max_len, std::uint64_t seed) {
  numerics::Rng rng(seed);
  std::vector<model::TrainExample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto seq = random_words(rng, words, min_len, max_len);
    out.push_back(model::make_example(vocab, seq, seq));
  }
  return out;
}

/// `count` pairs with independently drawn source and target, so they can
/// only be reproduced by memorisation.
inline std::vector<model::TrainExample> random_pairs(const corpus::Vocab& vocab, std::size_t words, std::size_t count,
                                                     std::size_t min_len, std::size_t max_len, std::uint64_t seed) {
  numerics::Rng rng(seed);
  std::vector<model::TrainExample> out;
  for (std::size_t i = 0; i < count; ++i) {
    const auto src = random_words(rng, words, min_len, max_len);
    const auto tgt = random_words(rng, words, min_len, max_len);
    out.push_back(model::make_example(vocab, src, tgt));
  }
  return out;
}

inline model::ModelConfig toy_config(std::size_t vocab_size, std::size_t d = 16, std::size_t heads = 2) {
  model::ModelConfig c;
  c.vocab_size = vocab_size;
  c.d_model = d;
  c.heads = heads;
  c.encoder_layers = 1;
  c.decoder_layers = 1;
  c.ff_width = 2 * d;
  c.max_positions = 64;
  return c;
}

}  // namespace copygen::testing
