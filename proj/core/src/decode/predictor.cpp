// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/decode/predictor.hpp"

#include <algorithm>
#include <numeric>

#include "copygen/error.hpp"

namespace copygen::decode {

std::vector<Candidate> top_k(std::span<const double> dist, std::size_t k) {
  k = std::min(k, dist.size());
  std::vector<std::size_t> idx(dist.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) { return dist[a] > dist[b] || (dist[a] == dist[b] && a < b); });
  std::vector<Candidate> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back({idx[i], {}, dist[idx[i]]});
  return out;
}

EncodedSource Predictor::encoder_predictor(std::span<const std::string> input) {
  ++encoder_calls_;
  return do_encode(input);
}

std::vector<Candidate> Predictor::decoder_predictor(const EncodedSource& encoded, std::span<const TokenId> prefix,
                                                    std::size_t k) {
  ++decoder_calls_;
  const auto n = encoded.extended_size();
  if (k < 1 || k > n) {
    throw Error("invalid_k", "k=" + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  auto out = top_k(do_distribution(encoded, prefix), k);
  for (auto& c : out) c.token = surface(encoded, c.index);
  return out;
}

ModelPredictor::ModelPredictor(std::shared_ptr<const model::LoadedModel> model) : model_(std::move(model)) {
  if (!model_) throw Error("model_unavailable", "no model loaded");
}

EncodedSource ModelPredictor::do_encode(std::span<const std::string> input) {
  EncodedSource out;
  out.source = model::extend_source(model_->vocab, input);
  out.states = model::encode(model_->params, out.source.base);
  return out;
}

std::vector<double> ModelPredictor::do_distribution(const EncodedSource& encoded, std::span<const TokenId> prefix) {
  const auto step = model::decode_step(model_->params, prefix, encoded.states, encoded.source);
  return step.mixed_dist.values();
}

std::string ModelPredictor::surface(const EncodedSource& encoded, TokenId id) const {
  return model::resolve_token(model_->vocab, encoded.source, id);
}

}  // namespace copygen::decode
