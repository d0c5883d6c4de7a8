// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "copygen/corpus/tokenizer.hpp"

namespace copygen::corpus {

using Sentence = std::vector<std::string>;

/// An unlabeled document as an ordered list of non-empty sentences.
struct Document {
  std::string id;
  std::vector<Sentence> sentences;

  std::size_t size() const noexcept { return sentences.size(); }
};

/// Splits on full stops, question and exclamation marks (ASCII and
/// fullwidth); terminators stay with their sentence, a trailing fragment
/// without terminator is kept, empty fragments are dropped.
/// Throws Error("empty_document") when nothing remains.
Document split_sentences(std::string_view text, TokenizeMode mode = TokenizeMode::whitespace, std::string id = {});

/// Classic longest-common-subsequence length over tokens.
std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// Concatenation of the given sentences in the given order.
std::vector<std::string> concat_sentences(const Document& doc, std::span<const std::size_t> order);

}  // namespace copygen::corpus
