// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/corpus/tokenizer.hpp"

#include "copygen/error.hpp"

namespace copygen::corpus {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::size_t sequence_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xE) return 3;
  if ((lead >> 3) == 0x1E) return 4;
  return 1;
}

}  // namespace

TokenizeMode parse_tokenize_mode(std::string_view name) {
  if (name == "whitespace") return TokenizeMode::whitespace;
  if (name == "character") return TokenizeMode::character;
  throw Error("config_error", "unknown tokenize mode '" + std::string(name) + "'");
}

std::string_view to_string(TokenizeMode mode) {
  return mode == TokenizeMode::whitespace ? "whitespace" : "character";
}

std::vector<std::string> utf8_code_points(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    std::size_t len = sequence_length(static_cast<unsigned char>(text[i]));
    if (i + len > text.size()) len = 1;
    for (std::size_t k = 1; k < len; ++k) {
      if ((static_cast<unsigned char>(text[i + k]) >> 6) != 0x2) {
        len = 1;
        break;
      }
    }
    out.emplace_back(text.substr(i, len));
    i += len;
  }
  return out;
}

std::size_t utf8_length(std::string_view text) {
  std::size_t n = 0;
  for (char c : text) n += (static_cast<unsigned char>(c) >> 6) != 0x2;
  return n;
}

std::vector<std::string> tokenize(std::string_view text, TokenizeMode mode) {
  std::vector<std::string> tokens;
  if (mode == TokenizeMode::whitespace) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && is_space(text[i])) ++i;
      const std::size_t start = i;
      while (i < text.size() && !is_space(text[i])) ++i;
      if (i > start) tokens.emplace_back(text.substr(start, i - start));
    }
    return tokens;
  }
  for (auto& cp : utf8_code_points(text)) {
    if (cp.size() == 1 && is_space(cp[0])) continue;
    tokens.push_back(std::move(cp));
  }
  return tokens;
}

std::string detokenize(std::span<const std::string> tokens, TokenizeMode mode) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i && mode == TokenizeMode::whitespace) out += ' ';
    out += tokens[i];
  }
  return out;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  bool pending_space = false;
  for (char c : text) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += c;
  }
  return out;
}

}  // namespace copygen::corpus
