// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "copygen/numerics/rng.hpp"
#include "copygen/numerics/tensor.hpp"

namespace copygen::numerics {

class Tape;

/// Handle to a node recorded on a Tape. Cheap to copy; valid for the
/// lifetime of the tape that produced it.
class Var {
 public:
  Var() = default;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Tensor& value() const;
  const Shape& shape() const { return value().shape(); }
  std::size_t id() const noexcept { return id_; }
  Tape& tape() const { return *tape_; }
  bool valid() const noexcept { return tape_ != nullptr; }
  bool needs_grad() const;

 private:
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

/// Gradients produced by one backward traversal, indexed by node.
class Gradients {
 public:
  Gradients() = default;
  Gradients(std::vector<std::vector<double>> grads, std::vector<Shape> shapes)
      : grads_(std::move(grads)), shapes_(std::move(shapes)) {}

  /// Gradient of the loss with respect to `v`; an all-zero tensor if the
  /// loss does not depend on it.
  Tensor of(const Var& v) const;

 private:
  std::vector<std::vector<double>> grads_;
  std::vector<Shape> shapes_;
};

/// Records operations in execution order (which is a topological order)
/// for reverse-mode differentiation. Confined to one thread.
class Tape {
 public:
  /// Receives the output gradient and one mutable gradient span per input;
  /// spans of inputs that need no gradient are empty.
  using BackwardFn = std::function<void(std::span<const double> grad_out, std::span<std::span<double>> grad_in)>;

  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  /// Adds a leaf. Its gradient is tracked iff `value.requires_grad()`.
  Var leaf(Tensor value);
  Var constant(Tensor value);
  Var parameter(Tensor value);
  /// Leaf that refers to `value` without copying it; `value` must outlive
  /// the tape and stay unmodified while the tape is in use.
  Var reference(const Tensor& value, bool track_grad);

  /// Records a derived node. `backward` is dropped when no input needs a
  /// gradient, so inference-only tapes store values alone.
  Var record(Tensor value, std::vector<Var> inputs, BackwardFn backward);

  const Tensor& value(std::size_t id) const {
    const auto& n = nodes_[id];
    return n.external ? *n.external : n.value;
  }
  bool needs_grad(std::size_t id) const { return nodes_[id].needs_grad; }
  std::size_t size() const noexcept { return nodes_.size(); }

  /// Reverse sweep from a scalar loss.
  Gradients backward(const Var& loss) const;

  /// Training mode enables dropout. Off by default.
  bool training() const noexcept { return training_; }
  void set_training(bool on, std::uint64_t dropout_seed = 0) {
    training_ = on;
    dropout_rng_ = Rng(dropout_seed);
  }
  Rng& dropout_rng() { return dropout_rng_; }

 private:
  struct Node {
    Tensor value;
    const Tensor* external = nullptr;
    std::vector<std::size_t> inputs;
    BackwardFn backward;
    bool needs_grad = false;
  };
  std::vector<Node> nodes_;
  bool training_ = false;
  Rng dropout_rng_{0};
};

// Differentiable operations. All operands must live on the same tape.

Var matmul(const Var& a, const Var& b);
Var transpose(const Var& a);
Var add(const Var& a, const Var& b);
Var sub(const Var& a, const Var& b);
Var mul(const Var& a, const Var& b);
Var scale(const Var& a, double factor);
/// Adds a length-n bias to every row of an [m x n] matrix.
Var add_bias(const Var& x, const Var& bias);
Var square(const Var& a);
Var sigmoid(const Var& a);
Var gelu(const Var& a);
Var relu(const Var& a);
Var softmax(const Var& x, std::size_t axis);
/// Replaces entries where `mask[i]` is true by a large negative value so a
/// following softmax assigns them zero probability.
Var mask_fill(const Var& x, const std::vector<bool>& mask);
/// Row-wise layer normalisation with learned gain and bias of length n.
Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps = 1e-5);
/// Rows of `table` selected by `ids` (embedding lookup).
Var gather_rows(const Var& table, std::span<const std::size_t> ids);
Var slice_cols(const Var& x, std::size_t start, std::size_t count);
Var concat_cols(const std::vector<Var>& parts);
Var sum(const Var& x);
Var mean(const Var& x);
/// Inverted dropout; identity unless the tape is in training mode.
Var dropout(const Var& x, double rate);
/// -log(max(p[target], floor)) for a probability vector.
Var cross_entropy(const Var& distribution, std::size_t target);
/// Mean over rows of -log(max(dist[r, targets[r]], floor)).
Var mean_row_nll(const Var& distributions, std::span<const std::size_t> targets);

}  // namespace copygen::numerics
