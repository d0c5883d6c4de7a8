// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// A hand-specified predictor over a 3-token vocabulary and the exhaustive
// search it is checked against.

#include <cmath>
#include <string>
#include <vector>

#include "copygen/decode/beam.hpp"
#include "copygen/numerics/rng.hpp"

namespace copygen::testing {

using decode::TokenId;
using corpus::kEos;

// Next-token distributions drawn per prefix from a seeded generator, over a
// 3-token vocabulary whose id 2 is EOS.
class TablePredictor final : public decode::Predictor {
 public:
  explicit TablePredictor(std::uint64_t seed) : seed_(seed) {}

  std::vector<double> table(std::span<const TokenId> prefix) const {
    std::uint64_t h = seed_;
    for (std::size_t i = 1; i < prefix.size(); ++i) h = h * 1000003u + prefix[i] + 1;
    numerics::Rng rng(h);
    std::vector<double> p(3);
    double z = 0.0;
    for (auto& x : p) z += (x = 0.05 + rng.uniform());
    for (auto& x : p) x /= z;
    return p;
  }

 protected:
  decode::EncodedSource do_encode(std::span<const std::string>) override {
    decode::EncodedSource e;
    e.source.vocab_size = 3;
    return e;
  }
  std::vector<double> do_distribution(const decode::EncodedSource&, std::span<const TokenId> prefix) override {
    return table(prefix);
  }
  std::string surface(const decode::EncodedSource&, TokenId id) const override { return "t" + std::to_string(id); }

 private:
  std::uint64_t seed_;
};

struct Best {
  std::vector<TokenId> tokens;
  double score = -INFINITY;
};

inline void enumerate(const TablePredictor& t, std::vector<TokenId>& prefix, double lp, std::size_t max_len, double alpha,
               Best& best) {
  const auto p = t.table(prefix);
  for (TokenId tok = 0; tok < 3; ++tok) {
    prefix.push_back(tok);
    const double next = lp + std::log(p[tok]);
    const std::size_t len = prefix.size() - 1;
    if (tok == kEos || len == max_len) {
      const double s = decode::normalized_score(next, len, alpha);
      if (s > best.score) best = {prefix, s};
    } else {
      enumerate(t, prefix, next, max_len, alpha, best);
    }
    prefix.pop_back();
  }
}

}  // namespace copygen::testing
