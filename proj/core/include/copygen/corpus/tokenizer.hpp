// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace copygen::corpus {

enum class TokenizeMode { whitespace, character };

TokenizeMode parse_tokenize_mode(std::string_view name);
std::string_view to_string(TokenizeMode mode);

/// Whitespace mode splits on ASCII whitespace; character mode emits one
/// token per Unicode code point and drops whitespace.
std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode);
std::string detokenize(std::span<const std::string> tokens, TokenizeMode mode);

/// Splits UTF-8 into code points. Invalid bytes become single-byte tokens.
std::vector<std::string> utf8_code_points(std::string_view text);
std::size_t utf8_length(std::string_view text);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

}  // namespace copygen::corpus
