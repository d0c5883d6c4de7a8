// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/decode/beam.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "copygen/error.hpp"

namespace copygen::decode {

double normalized_score(double log_prob, std::size_t length, double alpha) {
  if (alpha == 0.0 || length == 0) return log_prob;
  return log_prob / std::pow(static_cast<double>(length), alpha);
}

namespace {

void validate(const BeamConfig& c) {
  if (c.beam_size < 1) throw Error("config_error", "beam_size must be at least 1");
  if (c.max_len < 1) throw Error("config_error", "max_len must be at least 1");
  if (c.length_alpha < 0.0) throw Error("config_error", "length_alpha must be non-negative");
}

// True when appending `next` would repeat a trigram already in `tokens`.
bool repeats_trigram(const std::vector<TokenId>& tokens, TokenId next) {
  const std::size_t n = tokens.size();
  if (n < 2) return false;
  const TokenId a = tokens[n - 2], b = tokens[n - 1];
  for (std::size_t i = 0; i + 2 < n; ++i)
    if (tokens[i] == a && tokens[i + 1] == b && tokens[i + 2] == next) return true;
  return false;
}

struct Expansion {
  std::size_t parent;
  TokenId token;
  double log_prob;
};

}  // namespace

std::vector<Hypothesis> beam_search(const StepFn& step, std::size_t vocab_size, const BeamConfig& config,
                                    std::size_t* steps) {
  validate(config);
  if (vocab_size == 0) throw Error("config_error", "empty vocabulary");
  const std::size_t B = config.beam_size;
  std::vector<Hypothesis> active = {Hypothesis{{config.bos}, 0.0, false, 0.0}};
  std::vector<Hypothesis> finished;
  if (steps) *steps = 0;

  for (std::size_t len = 1; len <= config.max_len && !active.empty(); ++len) {
    if (steps) *steps = len;
    std::vector<Expansion> pool;
    for (std::size_t p = 0; p < active.size(); ++p) {
      const auto& h = active[p];
      const std::size_t k = config.no_repeat_trigram ? vocab_size : std::min(B, vocab_size);
      std::size_t kept = 0;
      for (const auto& c : step(h.tokens, k)) {
        if (kept == B) break;
        if (config.no_repeat_trigram && repeats_trigram(h.tokens, c.index)) continue;
        pool.push_back({p, c.index, h.log_prob + std::log(c.probability)});
        ++kept;
      }
    }
    // Stable: equal scores keep parent order, then candidate order.
    std::stable_sort(pool.begin(), pool.end(),
                     [](const Expansion& a, const Expansion& b) { return a.log_prob > b.log_prob; });
    std::vector<Hypothesis> next;
    for (std::size_t i = 0; i < std::min(B, pool.size()); ++i) {
      const auto& e = pool[i];
      Hypothesis h{active[e.parent].tokens, e.log_prob, false, 0.0};
      h.tokens.push_back(e.token);
      h.finished = e.token == config.eos || len == config.max_len;
      (h.finished ? finished : next).push_back(std::move(h));
    }
    active = std::move(next);
    if (finished.size() >= B) break;
  }

  std::vector<Hypothesis> ranked = std::move(finished);
  ranked.insert(ranked.end(), active.begin(), active.end());
  for (auto& h : ranked) h.score = normalized_score(h.log_prob, h.length(), config.length_alpha);
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const Hypothesis& a, const Hypothesis& b) { return a.score > b.score; });
  if (ranked.size() > B) ranked.resize(B);
  return ranked;
}

std::vector<Hypothesis> beam_search(Predictor& predictor, const EncodedSource& encoded, const BeamConfig& config,
                                    std::size_t* steps) {
  StepFn step = [&](std::span<const TokenId> prefix, std::size_t k) {
    return predictor.decoder_predictor(encoded, prefix, k);
  };
  return beam_search(step, encoded.extended_size(), config, steps);
}

Hypothesis greedy_decode(Predictor& predictor, const EncodedSource& encoded, std::size_t max_len) {
  if (max_len < 1) throw Error("config_error", "max_len must be at least 1");
  Hypothesis h{{corpus::kBos}, 0.0, false, 0.0};
  while (!h.finished) {
    const auto best = predictor.decoder_predictor(encoded, h.tokens, 1).front();
    h.tokens.push_back(best.index);
    h.log_prob += std::log(best.probability);
    h.finished = best.index == corpus::kEos || h.length() == max_len;
  }
  h.score = h.log_prob;
  return h;
}

std::vector<Hypothesis> beam_search_monolithic(const model::ModelParams& params, const model::SourceIds& source,
                                               const BeamConfig& config) {
  const auto states = model::encode(params, source.base);
  StepFn step = [&](std::span<const TokenId> prefix, std::size_t k) {
    const auto out = model::decode_step(params, prefix, states, source);
    const auto dist = out.mixed_dist.data();
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return dist[a] > dist[b]; });
    std::vector<Candidate> cands;
    for (std::size_t i = 0; i < k; ++i) cands.push_back({order[i], {}, dist[order[i]]});
    return cands;
  };
  return beam_search(step, source.extended_size(), config);
}

std::vector<std::string> surface_tokens(const corpus::Vocab& vocab, const model::SourceIds& source,
                                        const Hypothesis& hyp) {
  std::vector<std::string> out;
  for (std::size_t i = 1; i < hyp.tokens.size(); ++i) {
    const auto id = hyp.tokens[i];
    if (id == corpus::kEos) break;
    out.push_back(model::resolve_token(vocab, source, id));
  }
  return out;
}

}  // namespace copygen::decode
