// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Central finite-difference oracle for reverse-mode gradients. Test-only;
// it never calls Tape::backward on the perturbed evaluations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "copygen/numerics/autograd.hpp"

namespace copygen::testing {

using LossFn = std::function<numerics::Var(numerics::Tape&, const std::vector<numerics::Var>&)>;

inline double evaluate_loss(const LossFn& fn, const std::vector<numerics::Tensor>& inputs) {
  numerics::Tape tape;
  std::vector<numerics::Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.constant(t));
  return fn(tape, vars).value().item();
}

struct GradCheckResult {
  double max_relative_error = 0.0;
  double max_abs_gradient = 0.0;
  std::size_t checked = 0;
};

/// Compares analytic gradients with central differences. Coordinates are
/// visited with a stride so large parameter sets stay cheap; relative error
/// uses max(|a|, |n|, abs_floor) as the denominator.
inline GradCheckResult gradient_check(const LossFn& fn, const std::vector<numerics::Tensor>& inputs,
                                      double step = 1e-5, std::size_t max_coords_per_input = 1u << 30,
                                      double abs_floor = 1e-6) {
  numerics::Tape tape;
  std::vector<numerics::Var> vars;
  for (const auto& t : inputs) vars.push_back(tape.parameter(t));
  const auto loss = fn(tape, vars);
  const auto grads = tape.backward(loss);

  GradCheckResult result;
  for (std::size_t k = 0; k < inputs.size(); ++k) {
    const auto analytic = grads.of(vars[k]);
    const std::size_t n = inputs[k].size();
    const std::size_t stride = std::max<std::size_t>(1, n / std::min(n, max_coords_per_input));
    for (std::size_t i = 0; i < n; i += stride) {
      auto plus = inputs;
      auto minus = inputs;
      plus[k].mutable_data()[i] += step;
      minus[k].mutable_data()[i] -= step;
      const double numeric = (evaluate_loss(fn, plus) - evaluate_loss(fn, minus)) / (2.0 * step);
      const double a = analytic[i];
      const double denom = std::max({std::abs(a), std::abs(numeric), abs_floor});
      result.max_relative_error = std::max(result.max_relative_error, std::abs(a - numeric) / denom);
      result.max_abs_gradient = std::max(result.max_abs_gradient, std::abs(a));
      ++result.checked;
    }
  }
  return result;
}

inline numerics::Tensor random_tensor(numerics::Rng& rng, numerics::Shape shape, double scale = 1.0) {
  numerics::Tensor t(std::move(shape));
  for (auto& v : t.mutable_data()) v = rng.uniform(-scale, scale);
  return t;
}

}  // namespace copygen::testing
