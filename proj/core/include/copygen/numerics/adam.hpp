// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "copygen/numerics/tensor.hpp"

namespace copygen::numerics {

struct AdamHyper {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// First/second moment estimates for a fixed, ordered list of parameters.
class AdamState {
 public:
  explicit AdamState(AdamHyper hyper = {}) : hyper_(hyper) {}

  const AdamHyper& hyper() const noexcept { return hyper_; }
  std::size_t steps() const noexcept { return steps_; }
  const std::vector<Tensor>& first_moments() const noexcept { return m_; }
  const std::vector<Tensor>& second_moments() const noexcept { return v_; }

 private:
  friend void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state);

  AdamHyper hyper_;
  std::vector<Tensor> m_;
  std::vector<Tensor> v_;
  std::size_t steps_ = 0;
};

/// One bias-corrected Adam update applied in order to every parameter.
/// Moments are allocated on the first call and must stay shape-congruent.
void adam_step(std::span<Tensor> params, std::span<const Tensor> grads, AdamState& state);

}  // namespace copygen::numerics
