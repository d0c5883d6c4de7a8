// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace copygen::corpus {

using TokenId = std::size_t;

/// Reserved tokens, always the lowest ids in this order.
enum class Special : TokenId { pad = 0, bos, eos, unk, sep, title, attr, slogan, extra };

inline constexpr std::array<std::string_view, 9> kSpecialTokens = {
    "<pad>", "<bos>", "<eos>", "<unk>", "<sep>", "<title>", "<attr>", "<slogan>", "<extra>"};
inline constexpr std::size_t kNumSpecials = kSpecialTokens.size();

constexpr TokenId id_of(Special s) { return static_cast<TokenId>(s); }
inline constexpr TokenId kPad = id_of(Special::pad);
inline constexpr TokenId kBos = id_of(Special::bos);
inline constexpr TokenId kEos = id_of(Special::eos);
inline constexpr TokenId kUnk = id_of(Special::unk);

/// Token <-> id bijection.
class Vocab {
 public:
  /// Frequency-ranked vocabulary (ties broken lexicographically), truncated
  /// to `max_size` entries including the specials. Tokens seen fewer than
  /// `min_freq` times are left out and encode to <unk>.
  static Vocab build(std::span<const std::vector<std::string>> corpus, std::size_t min_freq, std::size_t max_size);

  /// Rebuilds from an id-ordered token list whose prefix is the specials.
  static Vocab from_tokens(std::vector<std::string> tokens);

  static Vocab load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  std::size_t size() const noexcept { return tokens_.size(); }
  std::optional<TokenId> find(std::string_view token) const;
  TokenId id(std::string_view token) const { return find(token).value_or(kUnk); }
  const std::string& token(TokenId id) const;
  bool contains(std::string_view token) const { return find(token).has_value(); }
  const std::vector<std::string>& tokens() const noexcept { return tokens_; }

  std::vector<TokenId> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const TokenId> ids) const;

 private:
  explicit Vocab(std::vector<std::string> tokens);

  std::vector<std::string> tokens_;
  std::unordered_map<std::string, TokenId> index_;
};

}  // namespace copygen::corpus
