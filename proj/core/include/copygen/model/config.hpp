// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>

namespace copygen::model {

/// Architecture of the transformer-pointer network.
struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t d_model = 32;
  std::size_t heads = 2;
  std::size_t encoder_layers = 1;
  std::size_t decoder_layers = 1;
  std::size_t ff_width = 64;
  std::size_t max_positions = 128;
  /// Residual dropout, applied only while training.
  double dropout = 0.0;
  /// When false the output is the plain vocabulary softmax (p_gen fixed at 1).
  bool pointer = true;

  /// Throws Error("config_error") unless every extent is positive and
  /// d_model is divisible by heads.
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

/// Flat JSON object used in checkpoint headers.
std::string config_to_json(const ModelConfig& config);
ModelConfig config_from_json(const std::string& text);

}  // namespace copygen::model
