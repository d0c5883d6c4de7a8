// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/model/params.hpp"

#include <cmath>

#include "copygen/error.hpp"
#include "copygen/numerics/rng.hpp"

namespace copygen::model {

using numerics::Shape;

void ModelConfig::validate() const {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) throw Error("config_error", what);
  };
  require(vocab_size > 0, "vocab_size must be positive");
  require(d_model > 0, "d_model must be positive");
  require(heads > 0, "heads must be positive");
  require(encoder_layers > 0, "encoder_layers must be positive");
  require(decoder_layers > 0, "decoder_layers must be positive");
  require(ff_width > 0, "ff_width must be positive");
  require(max_positions > 0, "max_positions must be positive");
  require(d_model % heads == 0, "d_model " + std::to_string(d_model) + " not divisible by heads " + std::to_string(heads));
  require(dropout >= 0.0 && dropout < 1.0, "dropout must lie in [0, 1)");
}

namespace {

void add_attention(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix, std::size_t d) {
  for (const char* m : {"wq", "wk", "wv", "wo"}) out.emplace_back(prefix + "." + m, Shape{d, d});
  for (const char* b : {"bq", "bk", "bv", "bo"}) out.emplace_back(prefix + "." + b, Shape{d});
}

void add_norm(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix, std::size_t d) {
  out.emplace_back(prefix + ".g", Shape{d});
  out.emplace_back(prefix + ".b", Shape{d});
}

void add_ff(std::vector<std::pair<std::string, Shape>>& out, const std::string& prefix, std::size_t d, std::size_t f) {
  out.emplace_back(prefix + ".w1", Shape{d, f});
  out.emplace_back(prefix + ".b1", Shape{f});
  out.emplace_back(prefix + ".w2", Shape{f, d});
  out.emplace_back(prefix + ".b2", Shape{d});
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

std::vector<std::pair<std::string, Shape>> parameter_layout(const ModelConfig& c) {
  c.validate();
  const std::size_t d = c.d_model;
  std::vector<std::pair<std::string, Shape>> out;
  out.emplace_back("embed.token", Shape{c.vocab_size, d});
  for (std::size_t l = 0; l < c.encoder_layers; ++l) {
    const auto p = "enc." + std::to_string(l);
    add_norm(out, p + ".ln1", d);
    add_attention(out, p + ".attn", d);
    add_norm(out, p + ".ln2", d);
    add_ff(out, p + ".ff", d, c.ff_width);
  }
  add_norm(out, "enc.ln_f", d);
  for (std::size_t l = 0; l < c.decoder_layers; ++l) {
    const auto p = "dec." + std::to_string(l);
    add_norm(out, p + ".ln1", d);
    add_attention(out, p + ".self", d);
    add_norm(out, p + ".ln2", d);
    add_attention(out, p + ".cross", d);
    add_norm(out, p + ".ln3", d);
    add_ff(out, p + ".ff", d, c.ff_width);
  }
  add_norm(out, "dec.ln_f", d);
  out.emplace_back("out.w", Shape{d, c.vocab_size});
  out.emplace_back("out.b", Shape{c.vocab_size});
  out.emplace_back("pgen.w", Shape{3 * d, 1});
  out.emplace_back("pgen.b", Shape{1});
  return out;
}

Tensor sinusoidal_positions(std::size_t max_positions, std::size_t d_model) {
  std::vector<double> v(max_positions * d_model);
  for (std::size_t pos = 0; pos < max_positions; ++pos) {
    for (std::size_t i = 0; i < d_model; ++i) {
      const double rate = std::pow(10000.0, -static_cast<double>(2 * (i / 2)) / static_cast<double>(d_model));
      const double angle = static_cast<double>(pos) * rate;
      v[pos * d_model + i] = (i % 2 == 0) ? std::sin(angle) : std::cos(angle);
    }
  }
  return Tensor({max_positions, d_model}, std::move(v));
}

ModelParams ModelParams::initialize(const ModelConfig& config, std::uint64_t seed) {
  numerics::Rng rng(seed);
  std::vector<std::pair<std::string, Tensor>> named;
  for (auto& [name, shape] : parameter_layout(config)) {
    Tensor t(shape, 0.0);
    if (shape.size() == 2) {
      // Embedding rows are unit-scale so they are comparable to the positions.
      const double sd = name == "embed.token" ? 1.0 : 1.0 / std::sqrt(static_cast<double>(shape[0]));
      for (auto& x : t.mutable_data()) x = rng.normal() * sd;
    } else if (ends_with(name, ".g")) {
      for (auto& x : t.mutable_data()) x = 1.0;
    }
    named.emplace_back(name, std::move(t));
  }
  return from_named(config, std::move(named));
}

ModelParams ModelParams::from_named(const ModelConfig& config, std::vector<std::pair<std::string, Tensor>> named) {
  const auto layout = parameter_layout(config);
  std::unordered_map<std::string, Tensor> by_name;
  for (auto& [name, t] : named) {
    if (!by_name.emplace(name, std::move(t)).second) throw Error("incompatible_checkpoint", "duplicate tensor " + name);
  }
  if (by_name.size() != layout.size()) {
    throw Error("incompatible_checkpoint",
                "expected " + std::to_string(layout.size()) + " tensors, got " + std::to_string(by_name.size()));
  }
  ModelParams p;
  p.config_ = config;
  for (const auto& [name, shape] : layout) {
    auto it = by_name.find(name);
    if (it == by_name.end()) throw Error("incompatible_checkpoint", "missing tensor " + name);
    if (it->second.shape() != shape) {
      throw Error("incompatible_checkpoint", name + " has shape " + numerics::shape_string(it->second.shape()) +
                                                 ", expected " + numerics::shape_string(shape));
    }
    p.index_.emplace(name, p.names_.size());
    p.names_.push_back(name);
    p.tensors_.push_back(std::move(it->second));
  }
  p.positional_ = sinusoidal_positions(config.max_positions, config.d_model);
  return p;
}

std::size_t ModelParams::index_of(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) throw Error("index_error", "no parameter named " + std::string(name));
  return it->second;
}

const Tensor& ModelParams::get(std::string_view name) const { return tensors_[index_of(name)]; }

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

bool ModelParams::all_finite() const {
  for (const auto& t : tensors_)
    if (!t.all_finite()) return false;
  return true;
}

}  // namespace copygen::model
