// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/numerics/autograd.hpp"

#include <algorithm>
#include <memory>
#include <cmath>

#include "copygen/error.hpp"

namespace copygen::numerics {

const Tensor& Var::value() const { return tape_->value(id_); }
bool Var::needs_grad() const { return tape_->needs_grad(id_); }

Tensor Gradients::of(const Var& v) const {
  const auto id = v.id();
  if (id < grads_.size() && !grads_[id].empty()) return Tensor(shapes_[id], grads_[id]);
  return Tensor(v.shape(), 0.0);
}

Var Tape::leaf(Tensor value) {
  const bool track = value.requires_grad();
  Node node;
  node.value = std::move(value);
  node.needs_grad = track;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::reference(const Tensor& value, bool track_grad) {
  Node node;
  node.external = &value;
  node.needs_grad = track_grad;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  value.set_requires_grad(false);
  return leaf(std::move(value));
}

Var Tape::parameter(Tensor value) {
  value.set_requires_grad(true);
  return leaf(std::move(value));
}

Var Tape::record(Tensor value, std::vector<Var> inputs, BackwardFn backward) {
  Node node;
  node.value = std::move(value);
  for (const auto& in : inputs) {
    if (&in.tape() != this) throw Error("tape_error", "operands recorded on different tapes");
    node.inputs.push_back(in.id());
    node.needs_grad = node.needs_grad || nodes_[in.id()].needs_grad;
  }
  if (node.needs_grad) node.backward = std::move(backward);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Gradients Tape::backward(const Var& loss) const {
  if (&loss.tape() != this) throw Error("tape_error", "loss belongs to another tape");
  if (loss.value().size() != 1) {
    throw Error("shape_error", "backward requires a scalar loss, got " + shape_string(loss.shape()));
  }
  std::vector<std::vector<double>> grads(nodes_.size());
  std::vector<Shape> shapes(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) shapes[i] = value(i).shape();
  if (!nodes_[loss.id()].needs_grad) return Gradients(std::move(grads), std::move(shapes));
  grads[loss.id()].assign(1, 1.0);

  std::vector<std::span<double>> in_spans;
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    const Node& node = nodes_[id];
    if (!node.backward || grads[id].empty()) continue;
    in_spans.clear();
    for (auto in : node.inputs) {
      if (!nodes_[in].needs_grad) {
        in_spans.emplace_back();
        continue;
      }
      if (grads[in].empty()) grads[in].assign(value(in).size(), 0.0);
      in_spans.emplace_back(grads[in]);
    }
    node.backward(grads[id], in_spans);
  }
  // Only leaves keep their gradients; interior buffers are scratch.
  for (std::size_t id = 0; id < nodes_.size(); ++id) {
    if (!nodes_[id].inputs.empty()) grads[id].clear();
  }
  return Gradients(std::move(grads), std::move(shapes));
}

namespace {

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw Error("shape_error", std::string(op) + " " + shape_string(a.shape()) + " vs " + shape_string(b.shape()));
  }
}

template <typename Fn>
Tensor map_values(const Tensor& x, Fn fn) {
  std::vector<double> out(x.size());
  const auto in = x.data();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = fn(in[i]);
  return Tensor(x.shape(), std::move(out));
}

constexpr double kMaskValue = -1e30;

}  // namespace

Var matmul(const Var& a, const Var& b) {
  Tape& tape = a.tape();
  const auto ia = a.id(), ib = b.id();
  Tensor out = matmul(a.value(), b.value());
  return tape.record(std::move(out), {a, b}, [&tape, ia, ib](std::span<const double> g, std::span<std::span<double>> gin) {
    const Tensor& A = tape.value(ia);
    const Tensor& B = tape.value(ib);
    const std::size_t m = A.shape()[0], k = A.shape()[1], n = B.shape()[1];
    const auto Ad = A.data();
    const auto Bd = B.data();
    if (!gin[0].empty()) {
      // dA[i,p] += sum_j g[i,j] * B[p,j]
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double acc = 0.0;
          for (std::size_t j = 0; j < n; ++j) acc += g[i * n + j] * Bd[p * n + j];
          gin[0][i * k + p] += acc;
        }
    }
    if (!gin[1].empty()) {
      // dB[p,j] += sum_i A[i,p] * g[i,j]
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double aip = Ad[i * k + p];
          if (aip == 0.0) continue;
          for (std::size_t j = 0; j < n; ++j) gin[1][p * n + j] += aip * g[i * n + j];
        }
    }
  });
}

Var transpose(const Var& a) {
  const std::size_t m = a.value().rows(), n = a.value().cols();
  return a.tape().record(transpose(a.value()), {a}, [m, n](std::span<const double> g, std::span<std::span<double>> gin) {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) gin[0][i * n + j] += g[j * m + i];
  });
}

Var add(const Var& a, const Var& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.value().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] + b.value()[i];
  return a.tape().record(Tensor(a.shape(), std::move(out)), {a, b},
                         [](std::span<const double> g, std::span<std::span<double>> gin) {
                           for (auto& d : gin)
                             if (!d.empty())
                               for (std::size_t i = 0; i < g.size(); ++i) d[i] += g[i];
                         });
}

Var sub(const Var& a, const Var& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.value().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] - b.value()[i];
  return a.tape().record(Tensor(a.shape(), std::move(out)), {a, b},
                         [](std::span<const double> g, std::span<std::span<double>> gin) {
                           if (!gin[0].empty())
                             for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
                           if (!gin[1].empty())
                             for (std::size_t i = 0; i < g.size(); ++i) gin[1][i] -= g[i];
                         });
}

Var mul(const Var& a, const Var& b) {
  require_same_shape(a, b, "mul");
  Tape& tape = a.tape();
  const auto ia = a.id(), ib = b.id();
  std::vector<double> out(a.value().size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
  return tape.record(Tensor(a.shape(), std::move(out)), {a, b},
                     [&tape, ia, ib](std::span<const double> g, std::span<std::span<double>> gin) {
                       const auto A = tape.value(ia).data();
                       const auto B = tape.value(ib).data();
                       if (!gin[0].empty())
                         for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i] * B[i];
                       if (!gin[1].empty())
                         for (std::size_t i = 0; i < g.size(); ++i) gin[1][i] += g[i] * A[i];
                     });
}

Var scale(const Var& a, double factor) {
  return a.tape().record(map_values(a.value(), [factor](double v) { return v * factor; }), {a},
                         [factor](std::span<const double> g, std::span<std::span<double>> gin) {
                           for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += factor * g[i];
                         });
}

Var add_bias(const Var& x, const Var& bias) {
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (bias.value().size() != n) {
    throw Error("shape_error", "bias " + shape_string(bias.shape()) + " for rows of width " + std::to_string(n));
  }
  std::vector<double> out(x.value().values());
  const auto b = bias.value().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] += b[j];
  return x.tape().record(Tensor(x.shape(), std::move(out)), {x, bias},
                         [m, n](std::span<const double> g, std::span<std::span<double>> gin) {
                           if (!gin[0].empty())
                             for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i];
                           if (!gin[1].empty())
                             for (std::size_t i = 0; i < m; ++i)
                               for (std::size_t j = 0; j < n; ++j) gin[1][j] += g[i * n + j];
                         });
}

Var square(const Var& a) { return mul(a, a); }

Var sigmoid(const Var& a) {
  Tensor out = map_values(a.value(), [](double v) {
    if (v >= 0) return 1.0 / (1.0 + std::exp(-v));
    const double e = std::exp(v);
    return e / (1.0 + e);
  });
  Tape& tape = a.tape();
  auto out_id = std::make_shared<std::size_t>(0);
  Var y = tape.record(std::move(out), {a}, [&tape, out_id](std::span<const double> g, std::span<std::span<double>> gin) {
    const auto Y = tape.value(*out_id).data();
    for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i] * Y[i] * (1.0 - Y[i]);
  });
  *out_id = y.id();
  return y;
}

Var gelu(const Var& a) {
  // tanh approximation; smooth everywhere, which keeps finite-difference
  // checks meaningful.
  constexpr double c = 0.7978845608028654;  // sqrt(2/pi)
  constexpr double k = 0.044715;
  Tape& tape = a.tape();
  const auto ia = a.id();
  Tensor out = map_values(a.value(), [](double x) { return 0.5 * x * (1.0 + std::tanh(c * (x + k * x * x * x))); });
  return tape.record(std::move(out), {a}, [&tape, ia](std::span<const double> g, std::span<std::span<double>> gin) {
    const auto X = tape.value(ia).data();
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = X[i];
      const double u = c * (x + k * x * x * x);
      const double t = std::tanh(u);
      const double du = c * (1.0 + 3.0 * k * x * x);
      gin[0][i] += g[i] * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du);
    }
  });
}

Var relu(const Var& a) {
  Tape& tape = a.tape();
  const auto ia = a.id();
  return tape.record(map_values(a.value(), [](double v) { return v > 0 ? v : 0.0; }), {a},
                     [&tape, ia](std::span<const double> g, std::span<std::span<double>> gin) {
                       const auto X = tape.value(ia).data();
                       for (std::size_t i = 0; i < g.size(); ++i)
                         if (X[i] > 0) gin[0][i] += g[i];
                     });
}

Var softmax(const Var& x, std::size_t axis) {
  Tape& tape = x.tape();
  Tensor out = softmax(x.value(), axis);
  const auto& shape = out.shape();
  std::size_t outer = 1, inner = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
  const std::size_t n = shape[axis];
  // The output id is only known after recording, so the closure reads it
  // through a shared slot.
  auto out_id = std::make_shared<std::size_t>(0);
  Var y = tape.record(std::move(out), {x},
                      [&tape, out_id, outer, inner, n](std::span<const double> g, std::span<std::span<double>> gin) {
                        const auto Y = tape.value(*out_id).data();
                        for (std::size_t o = 0; o < outer; ++o)
                          for (std::size_t q = 0; q < inner; ++q) {
                            const std::size_t base = o * n * inner + q;
                            double dot = 0.0;
                            for (std::size_t i = 0; i < n; ++i) dot += g[base + i * inner] * Y[base + i * inner];
                            for (std::size_t i = 0; i < n; ++i) {
                              const std::size_t at = base + i * inner;
                              gin[0][at] += Y[at] * (g[at] - dot);
                            }
                          }
                      });
  *out_id = y.id();
  return y;
}

Var mask_fill(const Var& x, const std::vector<bool>& mask) {
  if (mask.size() != x.value().size()) throw Error("shape_error", "mask size does not match tensor");
  std::vector<double> out(x.value().values());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (mask[i]) out[i] = kMaskValue;
  return x.tape().record(Tensor(x.shape(), std::move(out)), {x},
                         [mask](std::span<const double> g, std::span<std::span<double>> gin) {
                           for (std::size_t i = 0; i < g.size(); ++i)
                             if (!mask[i]) gin[0][i] += g[i];
                         });
}

Var layer_norm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (gain.value().size() != n || bias.value().size() != n) {
    throw Error("shape_error", "layer_norm parameters must have width " + std::to_string(n));
  }
  Tape& tape = x.tape();
  const auto X = x.value().data();
  const auto G = gain.value().data();
  const auto B = bias.value().data();
  std::vector<double> xhat(m * n), inv_std(m), out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    double mu = 0.0;
    for (std::size_t j = 0; j < n; ++j) mu += X[i * n + j];
    mu /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = X[i * n + j] - mu;
      var += d * d;
    }
    var /= static_cast<double>(n);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < n; ++j) {
      xhat[i * n + j] = (X[i * n + j] - mu) * inv_std[i];
      out[i * n + j] = G[j] * xhat[i * n + j] + B[j];
    }
  }
  const auto ig = gain.id();
  return tape.record(
      Tensor(x.shape(), std::move(out)), {x, gain, bias},
      [&tape, ig, m, n, xhat = std::move(xhat), inv_std = std::move(inv_std)](std::span<const double> g,
                                                                             std::span<std::span<double>> gin) {
        const auto Gv = tape.value(ig).data();
        if (!gin[1].empty())
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gin[1][j] += g[i * n + j] * xhat[i * n + j];
        if (!gin[2].empty())
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gin[2][j] += g[i * n + j];
        if (gin[0].empty()) return;
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < m; ++i) {
          double mean_d = 0.0, mean_dx = 0.0;
          for (std::size_t j = 0; j < n; ++j) {
            const double d = g[i * n + j] * Gv[j];
            mean_d += d;
            mean_dx += d * xhat[i * n + j];
          }
          mean_d *= inv_n;
          mean_dx *= inv_n;
          for (std::size_t j = 0; j < n; ++j) {
            const double d = g[i * n + j] * Gv[j];
            gin[0][i * n + j] += inv_std[i] * (d - mean_d - xhat[i * n + j] * mean_dx);
          }
        }
      });
}

Var gather_rows(const Var& table, std::span<const std::size_t> ids) {
  const std::size_t rows = table.value().rows(), n = table.value().cols();
  if (ids.empty()) throw Error("shape_error", "gather_rows with no ids");
  std::vector<double> out(ids.size() * n);
  const auto T = table.value().data();
  for (std::size_t r = 0; r < ids.size(); ++r) {
    if (ids[r] >= rows) throw Error("index_error", "row id " + std::to_string(ids[r]) + " outside table");
    std::copy_n(T.begin() + static_cast<std::ptrdiff_t>(ids[r] * n), n, out.begin() + static_cast<std::ptrdiff_t>(r * n));
  }
  std::vector<std::size_t> idv(ids.begin(), ids.end());
  return table.tape().record(Tensor({ids.size(), n}, std::move(out)), {table},
                             [idv = std::move(idv), n](std::span<const double> g, std::span<std::span<double>> gin) {
                               for (std::size_t r = 0; r < idv.size(); ++r)
                                 for (std::size_t j = 0; j < n; ++j) gin[0][idv[r] * n + j] += g[r * n + j];
                             });
}

Var slice_cols(const Var& x, std::size_t start, std::size_t count) {
  const std::size_t m = x.value().rows(), n = x.value().cols();
  if (count == 0 || start + count > n) throw Error("shape_error", "column slice out of range");
  std::vector<double> out(m * count);
  const auto X = x.value().data();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < count; ++j) out[i * count + j] = X[i * n + start + j];
  return x.tape().record(Tensor({m, count}, std::move(out)), {x},
                         [m, n, start, count](std::span<const double> g, std::span<std::span<double>> gin) {
                           for (std::size_t i = 0; i < m; ++i)
                             for (std::size_t j = 0; j < count; ++j) gin[0][i * n + start + j] += g[i * count + j];
                         });
}

Var concat_cols(const std::vector<Var>& parts) {
  if (parts.empty()) throw Error("shape_error", "concat of nothing");
  const std::size_t m = parts[0].value().rows();
  std::vector<std::size_t> widths;
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.value().rows() != m) throw Error("shape_error", "concat_cols row mismatch");
    widths.push_back(p.value().cols());
    total += widths.back();
  }
  std::vector<double> out(m * total);
  std::size_t offset = 0;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    const auto P = parts[k].value().data();
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < widths[k]; ++j) out[i * total + offset + j] = P[i * widths[k] + j];
    offset += widths[k];
  }
  return parts[0].tape().record(Tensor({m, total}, std::move(out)), parts,
                                [m, total, widths](std::span<const double> g, std::span<std::span<double>> gin) {
                                  std::size_t offset = 0;
                                  for (std::size_t k = 0; k < widths.size(); ++k) {
                                    if (!gin[k].empty())
                                      for (std::size_t i = 0; i < m; ++i)
                                        for (std::size_t j = 0; j < widths[k]; ++j)
                                          gin[k][i * widths[k] + j] += g[i * total + offset + j];
                                    offset += widths[k];
                                  }
                                });
}

Var sum(const Var& x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  return x.tape().record(Tensor::scalar(total), {x}, [](std::span<const double> g, std::span<std::span<double>> gin) {
    for (auto& d : gin[0]) d += g[0];
  });
}

Var mean(const Var& x) { return scale(sum(x), 1.0 / static_cast<double>(x.value().size())); }

Var dropout(const Var& x, double rate) {
  Tape& tape = x.tape();
  if (!tape.training() || rate <= 0.0) return x;
  if (rate >= 1.0) throw Error("config_error", "dropout rate must be < 1");
  const double keep_scale = 1.0 / (1.0 - rate);
  std::vector<double> factors(x.value().size());
  for (auto& f : factors) f = tape.dropout_rng().uniform() < rate ? 0.0 : keep_scale;
  std::vector<double> out(x.value().values());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= factors[i];
  return tape.record(Tensor(x.shape(), std::move(out)), {x},
                     [factors = std::move(factors)](std::span<const double> g, std::span<std::span<double>> gin) {
                       for (std::size_t i = 0; i < g.size(); ++i) gin[0][i] += g[i] * factors[i];
                     });
}

Var cross_entropy(const Var& distribution, std::size_t target) {
  const double loss = cross_entropy(distribution.value(), target);
  const double p = distribution.value()[target];
  return distribution.tape().record(Tensor::scalar(loss), {distribution},
                                    [p, target](std::span<const double> g, std::span<std::span<double>> gin) {
                                      if (p > kProbabilityFloor) gin[0][target] += -g[0] / p;
                                    });
}

Var mean_row_nll(const Var& distributions, std::span<const std::size_t> targets) {
  const std::size_t m = distributions.value().rows(), n = distributions.value().cols();
  if (targets.size() != m) throw Error("shape_error", "one target per row required");
  const auto D = distributions.value().data();
  double total = 0.0;
  std::vector<double> probs(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (targets[i] >= n) throw Error("index_error", "target outside distribution");
    probs[i] = D[i * n + targets[i]];
    total += -std::log(std::max(probs[i], kProbabilityFloor));
  }
  const double inv_m = 1.0 / static_cast<double>(m);
  std::vector<std::size_t> tv(targets.begin(), targets.end());
  return distributions.tape().record(
      Tensor::scalar(total * inv_m), {distributions},
      [probs = std::move(probs), tv = std::move(tv), n, inv_m](std::span<const double> g,
                                                                std::span<std::span<double>> gin) {
        for (std::size_t i = 0; i < tv.size(); ++i)
          if (probs[i] > kProbabilityFloor) gin[0][i * n + tv[i]] += -g[0] * inv_m / probs[i];
      });
}

}  // namespace copygen::numerics
