// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/numerics/adam.hpp"

#include <cmath>

#include "copygen/error.hpp"

namespace copygen::numerics {

void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state) {
  if (params.size() != grads.size()) throw Error("shape_error", "adam_step: parameter/gradient count mismatch");
  if (state.m_.empty()) {
    for (const auto& p : params) {
      state.m_.emplace_back(p.shape(), 0.0);
      state.v_.emplace_back(p.shape(), 0.0);
    }
  }
  if (state.m_.size() != params.size()) throw Error("shape_error", "adam_step: parameter count changed");
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape() || params[i].shape() != state.m_[i].shape()) {
      throw Error("shape_error", "adam_step: shape mismatch at parameter " + std::to_string(i) + " " +
                                     shape_string(params[i].shape()) + " vs " + shape_string(grads[i].shape()));
    }
  }

  const auto& h = state.hyper_;
  state.steps_ += 1;
  const double t = static_cast<double>(state.steps_);
  const double bias1 = 1.0 - std::pow(h.beta1, t);
  const double bias2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i].mutable_data();
    auto m = state.m_[i].mutable_data();
    auto v = state.v_[i].mutable_data();
    const auto g = grads[i].data();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g[j];
      v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g[j] * g[j];
      const double m_hat = m[j] / bias1;
      const double v_hat = v[j] / bias2;
      p[j] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

}  // namespace copygen::numerics
