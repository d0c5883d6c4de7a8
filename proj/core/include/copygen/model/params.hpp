// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "copygen/model/config.hpp"
#include "copygen/numerics/tensor.hpp"

namespace copygen::model {

using numerics::Tensor;

/// All trainable tensors of the network, in a fixed creation order, plus
/// the (non-trainable) sinusoidal position table.
class ModelParams {
 public:
  ModelParams() = default;

  /// Random initialisation: N(0, 1/fan_in) weights, unit layer-norm gains,
  /// zero biases.
  static ModelParams initialize(const ModelConfig& config, std::uint64_t seed);

  /// Assembles parameters from named tensors (e.g. a checkpoint). Every
  /// expected name must be present with the expected shape.
  static ModelParams from_named(const ModelConfig& config, std::vector<std::pair<std::string, Tensor>> named);

  const ModelConfig& config() const noexcept { return config_; }
  const Tensor& get(std::string_view name) const;
  const Tensor& positional() const noexcept { return positional_; }

  std::span<const std::string> names() const noexcept { return names_; }
  std::span<const Tensor> tensors() const noexcept { return tensors_; }
  std::span<Tensor> mutable_tensors() noexcept { return tensors_; }
  std::size_t index_of(std::string_view name) const;
  std::size_t parameter_count() const;
  bool all_finite() const;

 private:
  ModelConfig config_;
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
  std::unordered_map<std::string, std::size_t> index_;
  Tensor positional_;
};

/// Expected (name, shape) list for a configuration, in creation order.
std::vector<std::pair<std::string, numerics::Shape>> parameter_layout(const ModelConfig& config);

/// Sinusoidal position encodings, [max_positions x d_model].
Tensor sinusoidal_positions(std::size_t max_positions, std::size_t d_model);

}  // namespace copygen::model
