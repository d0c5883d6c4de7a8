// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "copygen/corpus/pretrain.hpp"
#include "copygen/model/transformer_pointer.hpp"
#include "copygen/numerics/adam.hpp"

namespace copygen::model {

/// One encoded training pair; `target` ends with <eos>.
struct TrainExample {
  SourceIds source;
  std::vector<TokenId> target;
};

TrainExample make_example(const corpus::Vocab& vocab, std::span<const std::string> source,
                          std::span<const std::string> target);

struct TrainHyper {
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  numerics::AdamHyper adam{};
  /// Global gradient-norm clip; 0 disables clipping.
  double clip_norm = 1.0;
  /// Keep the copy head active on the pre-training objectives.
  bool pointer_in_pretraining = true;
  bool shuffle = true;
};

struct TrainResult {
  ModelParams params;
  /// Mean per-token loss of each epoch, measured during the epoch.
  std::vector<double> epoch_losses;
  std::size_t steps = 0;
};

using EpochCallback = std::function<void(std::size_t epoch, double mean_loss)>;

/// Mini-batch Adam on the per-token loss, continuing from `initial`.
/// Deterministic for a given seed. Throws training_diverged when a loss or
/// parameter becomes non-finite.
TrainResult train(ModelParams initial, std::span<const TrainExample> data, corpus::Objective objective,
                  const TrainHyper& hyper, std::uint64_t seed, const EpochCallback& on_epoch = {});

/// Same, starting from a fresh initialisation drawn from `seed`.
TrainResult train(const ModelConfig& config, std::span<const TrainExample> data, corpus::Objective objective,
                  const TrainHyper& hyper, std::uint64_t seed, const EpochCallback& on_epoch = {});

/// Mean of the loss gradients over `batch`, in parameter order.
std::vector<Tensor> batch_gradients(const ModelParams& params, std::span<const TrainExample* const> batch,
                                    const ForwardOptions& options, std::uint64_t dropout_seed, double* mean_loss);

}  // namespace copygen::model
