// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "copygen/corpus/vocab.hpp"
#include "copygen/model/params.hpp"
#include "copygen/numerics/autograd.hpp"

namespace copygen::model {

using corpus::TokenId;

/// A source sequence in both id spaces. Out-of-vocabulary source tokens get
/// temporary ids `vocab_size + j` in order of first appearance; the encoder
/// sees them as <unk>.
struct SourceIds {
  std::size_t vocab_size = 0;
  std::vector<TokenId> base;
  std::vector<TokenId> extended;
  std::vector<std::string> surface;
  /// Surface form of temporary id `vocab_size + j`.
  std::vector<std::string> oov;

  std::size_t extended_size() const noexcept { return vocab_size + oov.size(); }
};

SourceIds extend_source(const corpus::Vocab& vocab, std::span<const std::string> tokens);
/// Builds a SourceIds from base ids alone (no temporary ids).
SourceIds source_from_ids(std::size_t vocab_size, std::span<const TokenId> ids);

/// Target ids in the extended space with a final <eos> appended. Tokens that
/// are neither in the vocabulary nor in the source map to <unk>.
std::vector<TokenId> extend_target(const corpus::Vocab& vocab, const SourceIds& source,
                                   std::span<const std::string> tokens);

/// Surface string for an extended id.
std::string resolve_token(const corpus::Vocab& vocab, const SourceIds& source, TokenId id);

struct StepOutput {
  Tensor vocab_dist;  // [V]
  Tensor copy_dist;   // [S]
  double p_gen = 1.0;
  Tensor mixed_dist;  // [V + oov]
  /// Last decoder layer cross-attention rows, one per head.
  std::vector<Tensor> head_attention;
};

/// Encoder states, [S x d]. Throws input_too_long / empty_input.
Tensor encode(const ModelParams& params, std::span<const TokenId> source);

/// Next-token distributions after `prefix` (which starts with <bos> and may
/// contain temporary ids).
StepOutput decode_step(const ModelParams& params, std::span<const TokenId> prefix, const Tensor& encoder_states,
                       const SourceIds& source);

/// p_gen * vocab(w) + (1 - p_gen) * sum of copy weight on source positions
/// holding w, over the extended vocabulary.
Tensor mixed_distribution(const Tensor& vocab_dist, const Tensor& copy_dist, double p_gen,
                          std::span<const TokenId> source_extended, std::size_t extended_size);

/// Teacher-forced per-token mean of -log P(target). `target` is in the
/// extended id space and ends with <eos>.
double sequence_nll(const ModelParams& params, const SourceIds& source, std::span<const TokenId> target);

/// Differentiable forward pieces, used by training and gradient checks.
struct ForwardOptions {
  bool pointer = true;
  double dropout = 0.0;
};

struct ParamVars {
  const ModelParams* params = nullptr;
  std::vector<numerics::Var> vars;
  const numerics::Var& operator[](std::string_view name) const { return vars[params->index_of(name)]; }
};

/// Places every parameter on `tape` by reference.
ParamVars bind_params(numerics::Tape& tape, const ModelParams& params, bool track_grad);

/// Loss node for one example.
numerics::Var sequence_nll_var(numerics::Tape& tape, const ParamVars& vars, const SourceIds& source,
                               std::span<const TokenId> target, const ForwardOptions& options);

/// Differentiable pointer mixture: rows of `vocab` [T x V], `copy` [T x S],
/// `p_gen` [T x 1] combined into [T x extended_size].
numerics::Var pointer_mix(const numerics::Var& vocab, const numerics::Var& copy, const numerics::Var& p_gen,
                          std::span<const TokenId> source_extended, std::size_t extended_size);

}  // namespace copygen::model
