// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/model/transformer_pointer.hpp"

#include <cmath>
#include <memory>
#include <unordered_map>

#include "copygen/error.hpp"

namespace copygen::model {

namespace nx = copygen::numerics;
using nx::Tape;
using nx::Var;

SourceIds extend_source(const corpus::Vocab& vocab, std::span<const std::string> tokens) {
  SourceIds s;
  s.vocab_size = vocab.size();
  std::unordered_map<std::string, TokenId> temp;
  for (const auto& tok : tokens) {
    s.surface.push_back(tok);
    if (auto id = vocab.find(tok)) {
      s.base.push_back(*id);
      s.extended.push_back(*id);
      continue;
    }
    s.base.push_back(corpus::kUnk);
    auto [it, fresh] = temp.emplace(tok, s.vocab_size + s.oov.size());
    if (fresh) s.oov.push_back(tok);
    s.extended.push_back(it->second);
  }
  return s;
}

SourceIds source_from_ids(std::size_t vocab_size, std::span<const TokenId> ids) {
  SourceIds s;
  s.vocab_size = vocab_size;
  for (auto id : ids) {
    if (id >= vocab_size) throw Error("index_error", "source id " + std::to_string(id) + " outside vocabulary");
    s.base.push_back(id);
    s.extended.push_back(id);
    s.surface.push_back("#" + std::to_string(id));
  }
  return s;
}

std::vector<TokenId> extend_target(const corpus::Vocab& vocab, const SourceIds& source,
                                   std::span<const std::string> tokens) {
  std::vector<TokenId> out;
  out.reserve(tokens.size() + 1);
  for (const auto& tok : tokens) {
    if (auto id = vocab.find(tok)) {
      out.push_back(*id);
      continue;
    }
    TokenId id = corpus::kUnk;
    for (std::size_t j = 0; j < source.oov.size(); ++j)
      if (source.oov[j] == tok) id = source.vocab_size + j;
    out.push_back(id);
  }
  out.push_back(corpus::kEos);
  return out;
}

std::string resolve_token(const corpus::Vocab& vocab, const SourceIds& source, TokenId id) {
  if (id < vocab.size()) return vocab.token(id);
  const auto j = id - source.vocab_size;
  if (id < source.vocab_size || j >= source.oov.size()) {
    throw Error("index_error", "token id " + std::to_string(id) + " outside extended vocabulary");
  }
  return source.oov[j];
}

ParamVars bind_params(Tape& tape, const ModelParams& params, bool track_grad) {
  ParamVars pv;
  pv.params = &params;
  for (const auto& t : params.tensors()) pv.vars.push_back(tape.reference(t, track_grad));
  return pv;
}

namespace {

void check_length(std::size_t n, const ModelConfig& c, const char* what) {
  if (n == 0) throw Error("empty_input", std::string(what) + " is empty");
  if (n > c.max_positions) {
    throw Error("input_too_long", std::string(what) + " has " + std::to_string(n) + " tokens, limit " +
                                      std::to_string(c.max_positions));
  }
}

Var embed(Tape& tape, const ParamVars& pv, std::span<const TokenId> ids, double drop) {
  const auto& c = pv.params->config();
  std::vector<TokenId> clamped(ids.begin(), ids.end());
  for (auto& id : clamped)
    if (id >= c.vocab_size) id = corpus::kUnk;
  Var tok = nx::gather_rows(pv["embed.token"], clamped);
  const auto pos = pv.params->positional().data();
  Tensor p({ids.size(), c.d_model}, std::vector<double>(pos.begin(), pos.begin() + static_cast<std::ptrdiff_t>(ids.size() * c.d_model)));
  return nx::dropout(nx::add(tok, tape.constant(std::move(p))), drop);
}

Var linear(const Var& x, const Var& w, const Var& b) { return nx::add_bias(nx::matmul(x, w), b); }

Var norm(const ParamVars& pv, const Var& x, const std::string& prefix) {
  return nx::layer_norm(x, pv[prefix + ".g"], pv[prefix + ".b"]);
}

// Multi-head attention of `q_in` rows over `kv_in` rows. Per-head weight
// matrices are appended to `weights` when requested.
Var attention(const ParamVars& pv, const std::string& prefix, const Var& q_in, const Var& kv_in, bool causal,
              std::vector<Var>* weights) {
  const auto& c = pv.params->config();
  const std::size_t dk = c.d_model / c.heads;
  const std::size_t t = q_in.value().rows(), s = kv_in.value().rows();
  Var q = linear(q_in, pv[prefix + ".wq"], pv[prefix + ".bq"]);
  Var k = linear(kv_in, pv[prefix + ".wk"], pv[prefix + ".bk"]);
  Var v = linear(kv_in, pv[prefix + ".wv"], pv[prefix + ".bv"]);
  std::vector<bool> mask;
  if (causal) {
    mask.assign(t * s, false);
    for (std::size_t i = 0; i < t; ++i)
      for (std::size_t j = i + 1; j < s; ++j) mask[i * s + j] = true;
  }
  const double inv = 1.0 / std::sqrt(static_cast<double>(dk));
  std::vector<Var> heads;
  for (std::size_t h = 0; h < c.heads; ++h) {
    Var qh = nx::slice_cols(q, h * dk, dk);
    Var kh = nx::slice_cols(k, h * dk, dk);
    Var vh = nx::slice_cols(v, h * dk, dk);
    Var scores = nx::scale(nx::matmul(qh, nx::transpose(kh)), inv);
    if (causal) scores = nx::mask_fill(scores, mask);
    Var a = nx::softmax(scores, 1);
    if (weights) weights->push_back(a);
    heads.push_back(nx::matmul(a, vh));
  }
  Var joined = heads.size() == 1 ? heads[0] : nx::concat_cols(heads);
  return linear(joined, pv[prefix + ".wo"], pv[prefix + ".bo"]);
}

Var feed_forward(const ParamVars& pv, const std::string& prefix, const Var& x) {
  Var h = nx::gelu(linear(x, pv[prefix + ".w1"], pv[prefix + ".b1"]));
  return linear(h, pv[prefix + ".w2"], pv[prefix + ".b2"]);
}

Var encoder_forward(Tape& tape, const ParamVars& pv, std::span<const TokenId> source, double drop) {
  const auto& c = pv.params->config();
  check_length(source.size(), c, "source");
  Var x = embed(tape, pv, source, drop);
  for (std::size_t l = 0; l < c.encoder_layers; ++l) {
    const auto p = "enc." + std::to_string(l);
    Var h = norm(pv, x, p + ".ln1");
    x = nx::add(x, nx::dropout(attention(pv, p + ".attn", h, h, false, nullptr), drop));
    h = norm(pv, x, p + ".ln2");
    x = nx::add(x, nx::dropout(feed_forward(pv, p + ".ff", h), drop));
  }
  return norm(pv, x, "enc.ln_f");
}

struct DecoderGraph {
  Var vocab;   // [T x V]
  Var copy;    // [T x S]
  Var p_gen;   // [T x 1]
  Var mixed;   // [T x E]
  std::vector<Var> head_attention;
};

DecoderGraph decoder_forward(Tape& tape, const ParamVars& pv, std::span<const TokenId> inputs, const Var& memory,
                             const SourceIds& source, const ForwardOptions& opt) {
  const auto& c = pv.params->config();
  check_length(inputs.size(), c, "decoder prefix");
  Var y = embed(tape, pv, inputs, opt.dropout);
  DecoderGraph g;
  for (std::size_t l = 0; l < c.decoder_layers; ++l) {
    const auto p = "dec." + std::to_string(l);
    const bool last = l + 1 == c.decoder_layers;
    Var h = norm(pv, y, p + ".ln1");
    y = nx::add(y, nx::dropout(attention(pv, p + ".self", h, h, true, nullptr), opt.dropout));
    h = norm(pv, y, p + ".ln2");
    y = nx::add(y, nx::dropout(attention(pv, p + ".cross", h, memory, false, last ? &g.head_attention : nullptr),
                               opt.dropout));
    h = norm(pv, y, p + ".ln3");
    y = nx::add(y, nx::dropout(feed_forward(pv, p + ".ff", h), opt.dropout));
  }
  Var state = norm(pv, y, "dec.ln_f");
  g.vocab = nx::softmax(linear(state, pv["out.w"], pv["out.b"]), 1);

  Var summed = g.head_attention[0];
  for (std::size_t h = 1; h < g.head_attention.size(); ++h) summed = nx::add(summed, g.head_attention[h]);
  g.copy = g.head_attention.size() == 1 ? summed : nx::scale(summed, 1.0 / static_cast<double>(c.heads));

  const std::size_t t = inputs.size();
  if (c.pointer && opt.pointer) {
    std::vector<TokenId> prev(inputs.begin(), inputs.end());
    for (auto& id : prev)
      if (id >= c.vocab_size) id = corpus::kUnk;
    Var prev_embed = nx::gather_rows(pv["embed.token"], prev);
    Var context = nx::matmul(g.copy, memory);
    Var features = nx::concat_cols({context, state, prev_embed});
    g.p_gen = nx::sigmoid(linear(features, pv["pgen.w"], pv["pgen.b"]));
  } else {
    g.p_gen = tape.constant(Tensor({t, 1}, 1.0));
  }
  g.mixed = pointer_mix(g.vocab, g.copy, g.p_gen, source.extended, source.extended_size());
  return g;
}

std::vector<TokenId> teacher_inputs(std::span<const TokenId> target) {
  std::vector<TokenId> in;
  in.reserve(target.size());
  in.push_back(corpus::kBos);
  for (std::size_t i = 0; i + 1 < target.size(); ++i) in.push_back(target[i]);
  return in;
}

void check_source(const ModelParams& params, const SourceIds& source) {
  if (source.vocab_size != params.config().vocab_size) {
    throw Error("vocab_mismatch", "source built for vocabulary of " + std::to_string(source.vocab_size) +
                                      ", model has " + std::to_string(params.config().vocab_size));
  }
}

}  // namespace

Var pointer_mix(const Var& vocab, const Var& copy, const Var& p_gen, std::span<const TokenId> src,
                std::size_t extended_size) {
  Tape& tape = vocab.tape();
  const std::size_t t = vocab.value().rows(), v = vocab.value().cols(), s = copy.value().cols();
  if (copy.value().rows() != t || p_gen.value().size() != t || src.size() != s) {
    throw Error("shape_error", "pointer_mix operands disagree");
  }
  if (extended_size < v) throw Error("shape_error", "extended vocabulary smaller than base vocabulary");
  for (auto id : src)
    if (id >= extended_size) throw Error("index_error", "source id outside extended vocabulary");
  const auto V = vocab.value().data();
  const auto C = copy.value().data();
  const auto P = p_gen.value().data();
  std::vector<double> out(t * extended_size, 0.0);
  for (std::size_t r = 0; r < t; ++r) {
    const double p = P[r];
    double* row = out.data() + r * extended_size;
    for (std::size_t w = 0; w < v; ++w) row[w] = p * V[r * v + w];
    for (std::size_t i = 0; i < s; ++i) row[src[i]] += (1.0 - p) * C[r * s + i];
  }
  std::vector<TokenId> ids(src.begin(), src.end());
  const auto iv = vocab.id(), ic = copy.id(), ip = p_gen.id();
  return tape.record(Tensor({t, extended_size}, std::move(out)), {vocab, copy, p_gen},
                     [&tape, iv, ic, ip, ids, t, v, s, extended_size](std::span<const double> g,
                                                                      std::span<std::span<double>> gin) {
                       const auto Vd = tape.value(iv).data();
                       const auto Cd = tape.value(ic).data();
                       const auto Pd = tape.value(ip).data();
                       for (std::size_t r = 0; r < t; ++r) {
                         const double p = Pd[r];
                         const double* gr = g.data() + r * extended_size;
                         if (!gin[0].empty())
                           for (std::size_t w = 0; w < v; ++w) gin[0][r * v + w] += gr[w] * p;
                         if (!gin[1].empty())
                           for (std::size_t i = 0; i < s; ++i) gin[1][r * s + i] += gr[ids[i]] * (1.0 - p);
                         if (!gin[2].empty()) {
                           double acc = 0.0;
                           for (std::size_t w = 0; w < v; ++w) acc += gr[w] * Vd[r * v + w];
                           for (std::size_t i = 0; i < s; ++i) acc -= gr[ids[i]] * Cd[r * s + i];
                           gin[2][r] += acc;
                         }
                       }
                     });
}

Tensor encode(const ModelParams& params, std::span<const TokenId> source) {
  Tape tape;
  auto pv = bind_params(tape, params, false);
  return encoder_forward(tape, pv, source, 0.0).value();
}

StepOutput decode_step(const ModelParams& params, std::span<const TokenId> prefix, const Tensor& encoder_states,
                       const SourceIds& source) {
  check_source(params, source);
  if (prefix.empty() || prefix.front() != corpus::kBos) throw Error("invalid_prefix", "prefix must start with <bos>");
  if (encoder_states.rows() != source.extended.size()) {
    throw Error("shape_error", "encoder states do not match source length");
  }
  Tape tape;
  auto pv = bind_params(tape, params, false);
  Var memory = tape.reference(encoder_states, false);
  auto g = decoder_forward(tape, pv, prefix, memory, source, {});
  const std::size_t last = prefix.size() - 1;
  auto row_of = [last](const Var& x) {
    const auto r = x.value().row(last);
    return Tensor::vector(std::vector<double>(r.begin(), r.end()));
  };
  StepOutput out;
  out.vocab_dist = row_of(g.vocab);
  out.copy_dist = row_of(g.copy);
  out.p_gen = g.p_gen.value()[last];
  out.mixed_dist = row_of(g.mixed);
  for (const auto& h : g.head_attention) out.head_attention.push_back(row_of(h));
  return out;
}

Tensor mixed_distribution(const Tensor& vocab_dist, const Tensor& copy_dist, double p_gen,
                          std::span<const TokenId> source_extended, std::size_t extended_size) {
  if (!(p_gen >= 0.0 && p_gen <= 1.0)) throw Error("invalid_probability", "p_gen must lie in [0, 1]");
  if (copy_dist.size() != source_extended.size()) throw Error("shape_error", "copy_dist length must equal source length");
  const std::size_t v = vocab_dist.size();
  if (extended_size < v) throw Error("shape_error", "extended vocabulary smaller than base vocabulary");
  std::vector<double> out(extended_size, 0.0);
  for (std::size_t w = 0; w < v; ++w) out[w] = p_gen * vocab_dist[w];
  for (std::size_t i = 0; i < source_extended.size(); ++i) {
    if (source_extended[i] >= extended_size) throw Error("index_error", "source id outside extended vocabulary");
    out[source_extended[i]] += (1.0 - p_gen) * copy_dist[i];
  }
  return Tensor::vector(std::move(out));
}

Var sequence_nll_var(Tape& tape, const ParamVars& vars, const SourceIds& source, std::span<const TokenId> target,
                     const ForwardOptions& options) {
  check_source(*vars.params, source);
  if (target.empty()) throw Error("empty_target", "target has no tokens");
  if (target.back() != corpus::kEos) throw Error("invalid_target", "target must end with <eos>");
  for (auto id : target)
    if (id >= source.extended_size()) throw Error("index_error", "target id outside extended vocabulary");
  Var memory = encoder_forward(tape, vars, source.base, options.dropout);
  const auto inputs = teacher_inputs(target);
  auto g = decoder_forward(tape, vars, inputs, memory, source, options);
  return nx::mean_row_nll(g.mixed, target);
}

double sequence_nll(const ModelParams& params, const SourceIds& source, std::span<const TokenId> target) {
  Tape tape;
  auto pv = bind_params(tape, params, false);
  return sequence_nll_var(tape, pv, source, target, {}).value().item();
}

}  // namespace copygen::model
