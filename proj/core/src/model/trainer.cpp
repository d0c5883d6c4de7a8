// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/model/trainer.hpp"

#include <cmath>
#include <numeric>

#include "copygen/error.hpp"

namespace copygen::model {

namespace nx = copygen::numerics;

TrainExample make_example(const corpus::Vocab& vocab, std::span<const std::string> source,
                          std::span<const std::string> target) {
  TrainExample ex;
  ex.source = extend_source(vocab, source);
  ex.target = extend_target(vocab, ex.source, target);
  return ex;
}

std::vector<Tensor> batch_gradients(const ModelParams& params, std::span<const TrainExample* const> batch,
                                    const ForwardOptions& options, std::uint64_t dropout_seed, double* mean_loss) {
  std::vector<Tensor> grads;
  for (const auto& t : params.tensors()) grads.emplace_back(t.shape(), 0.0);
  double total = 0.0;
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (std::size_t b = 0; b < batch.size(); ++b) {
    nx::Tape tape;
    if (options.dropout > 0.0) tape.set_training(true, dropout_seed + b);
    auto pv = bind_params(tape, params, true);
    auto loss = sequence_nll_var(tape, pv, batch[b]->source, batch[b]->target, options);
    const double value = loss.value().item();
    if (!std::isfinite(value)) throw Error("training_diverged", "non-finite loss on a training example");
    total += value;
    const auto g = tape.backward(loss);
    for (std::size_t i = 0; i < grads.size(); ++i) {
      const auto gi = g.of(pv.vars[i]);
      auto dst = grads[i].mutable_data();
      const auto src = gi.data();
      for (std::size_t k = 0; k < dst.size(); ++k) dst[k] += src[k] * inv;
    }
  }
  if (mean_loss) *mean_loss = total * inv;
  return grads;
}

TrainResult train(ModelParams initial, std::span<const TrainExample> data, corpus::Objective objective,
                  const TrainHyper& hyper, std::uint64_t seed, const EpochCallback& on_epoch) {
  if (data.empty()) throw Error("empty_dataset", "no training examples");
  if (hyper.batch_size == 0) throw Error("config_error", "batch_size must be positive");
  const auto& config = initial.config();
  ForwardOptions options;
  options.dropout = config.dropout;
  options.pointer = objective == corpus::Objective::finetune || hyper.pointer_in_pretraining;

  TrainResult result{std::move(initial), {}, 0};
  nx::AdamState adam(hyper.adam);
  nx::Rng rng(seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  for (std::size_t epoch = 0; epoch < hyper.epochs; ++epoch) {
    if (hyper.shuffle) rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += hyper.batch_size) {
      std::vector<const TrainExample*> batch;
      for (std::size_t i = start; i < std::min(order.size(), start + hyper.batch_size); ++i)
        batch.push_back(&data[order[i]]);
      double batch_loss = 0.0;
      auto grads = batch_gradients(result.params, batch, options, rng.next_u64(), &batch_loss);
      if (hyper.clip_norm > 0.0) {
        double sq = 0.0;
        for (const auto& g : grads)
          for (double x : g.data()) sq += x * x;
        const double norm = std::sqrt(sq);
        if (norm > hyper.clip_norm) {
          const double f = hyper.clip_norm / norm;
          for (auto& g : grads)
            for (auto& x : g.mutable_data()) x *= f;
        }
      }
      nx::adam_step(result.params.mutable_tensors(), grads, adam);
      if (!result.params.all_finite()) throw Error("training_diverged", "non-finite parameter after step " + std::to_string(result.steps));
      ++result.steps;
      loss_sum += batch_loss * static_cast<double>(batch.size());
    }
    const double mean = loss_sum / static_cast<double>(data.size());
    result.epoch_losses.push_back(mean);
    if (on_epoch) on_epoch(epoch, mean);
  }
  return result;
}

TrainResult train(const ModelConfig& config, std::span<const TrainExample> data, corpus::Objective objective,
                  const TrainHyper& hyper, std::uint64_t seed, const EpochCallback& on_epoch) {
  return train(ModelParams::initialize(config, seed), data, objective, hyper, seed ^ 0x9e3779b97f4a7c15ULL, on_epoch);
}

}  // namespace copygen::model
