// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "copygen/model/checkpoint.hpp"
#include "copygen/model/transformer_pointer.hpp"

namespace copygen::decode {

using corpus::TokenId;
using numerics::Tensor;

/// Encoder output handed from the encoder predictor to the decoder predictor.
struct EncodedSource {
  model::SourceIds source;
  Tensor states;  // [S x d]; empty for table-driven predictors

  std::size_t length() const noexcept { return source.extended.size(); }
  std::size_t extended_size() const noexcept { return source.extended_size(); }
};

/// One next-token candidate.
struct Candidate {
  TokenId index = 0;
  std::string token;
  double probability = 0.0;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

/// The k most probable entries of `dist`, descending; equal probabilities
/// keep the smaller index first.
std::vector<Candidate> top_k(std::span<const double> dist, std::size_t k);

/// Split inference interface: one encoder call per generation, then repeated
/// decoder calls for next-token candidates.
class Predictor {
 public:
  virtual ~Predictor() = default;

  EncodedSource encoder_predictor(std::span<const std::string> input);
  /// Throws invalid_k unless 1 <= k <= extended vocabulary size.
  std::vector<Candidate> decoder_predictor(const EncodedSource& encoded, std::span<const TokenId> prefix,
                                           std::size_t k);

  std::size_t encoder_calls() const noexcept { return encoder_calls_.load(); }
  std::size_t decoder_calls() const noexcept { return decoder_calls_.load(); }
  void reset_counters() noexcept {
    encoder_calls_ = 0;
    decoder_calls_ = 0;
  }

 protected:
  virtual EncodedSource do_encode(std::span<const std::string> input) = 0;
  /// Full next-token distribution over the extended vocabulary.
  virtual std::vector<double> do_distribution(const EncodedSource& encoded, std::span<const TokenId> prefix) = 0;
  virtual std::string surface(const EncodedSource& encoded, TokenId id) const = 0;

 private:
  std::atomic<std::size_t> encoder_calls_{0};
  std::atomic<std::size_t> decoder_calls_{0};
};

/// Predictor backed by a trained network. Holds the model by shared pointer
/// so a swapped-out model stays alive while in use.
class ModelPredictor final : public Predictor {
 public:
  explicit ModelPredictor(std::shared_ptr<const model::LoadedModel> model);

  const model::LoadedModel& model() const noexcept { return *model_; }

 protected:
  EncodedSource do_encode(std::span<const std::string> input) override;
  std::vector<double> do_distribution(const EncodedSource& encoded, std::span<const TokenId> prefix) override;
  std::string surface(const EncodedSource& encoded, TokenId id) const override;

 private:
  std::shared_ptr<const model::LoadedModel> model_;
};

/// Wire form of the predictor types. Doubles are written with round-trip
/// precision so decoding from deserialised values is token-identical.
std::string to_json(const EncodedSource& encoded);
EncodedSource encoded_from_json(const std::string& text);
std::string to_json(const std::vector<Candidate>& candidates);
std::vector<Candidate> candidates_from_json(const std::string& text);

}  // namespace copygen::decode
