// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/corpus/vocab.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "copygen/error.hpp"

namespace copygen::corpus {

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kNumSpecials) throw Error("vocab_error", "vocabulary lacks the reserved tokens");
  for (std::size_t i = 0; i < kNumSpecials; ++i) {
    if (tokens_[i] != kSpecialTokens[i]) throw Error("vocab_error", "reserved token order mismatch at id " + std::to_string(i));
  }
  index_.reserve(tokens_.size());
  for (TokenId i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], i).second) throw Error("vocab_error", "duplicate token '" + tokens_[i] + "'");
  }
}

Vocab Vocab::build(std::span<const std::vector<std::string>> corpus, std::size_t min_freq, std::size_t max_size) {
  if (corpus.empty()) throw Error("vocab_error", "cannot build a vocabulary from an empty corpus");
  if (max_size < kNumSpecials) {
    throw Error("vocab_error", "max_size " + std::to_string(max_size) + " is smaller than the " +
                                   std::to_string(kNumSpecials) + " reserved tokens");
  }
  std::map<std::string, std::size_t> counts;
  for (const auto& seq : corpus)
    for (const auto& tok : seq) ++counts[tok];
  for (auto special : kSpecialTokens) counts.erase(std::string(special));

  std::vector<std::pair<std::string, std::size_t>> ranked;
  for (auto& [tok, n] : counts)
    if (n >= std::max<std::size_t>(min_freq, 1)) ranked.emplace_back(tok, n);
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  std::vector<std::string> tokens(kSpecialTokens.begin(), kSpecialTokens.end());
  for (auto& [tok, n] : ranked) {
    if (tokens.size() >= max_size) break;
    tokens.push_back(tok);
  }
  return Vocab(std::move(tokens));
}

Vocab Vocab::from_tokens(std::vector<std::string> tokens) { return Vocab(std::move(tokens)); }

Vocab Vocab::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot read vocabulary " + path.string());
  std::vector<std::string> tokens;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    tokens.push_back(line);
  }
  return Vocab(std::move(tokens));
}

void Vocab::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write vocabulary " + path.string());
  for (const auto& tok : tokens_) out << tok << '\n';
}

std::optional<TokenId> Vocab::find(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const std::string& Vocab::token(TokenId id) const {
  if (id >= tokens_.size()) throw Error("index_error", "token id " + std::to_string(id) + " outside vocabulary");
  return tokens_[id];
}

std::vector<TokenId> Vocab::encode(std::span<const std::string> tokens) const {
  std::vector<TokenId> ids;
  ids.reserve(tokens.size());
  for (const auto& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocab::decode(std::span<const TokenId> ids) const {
  std::vector<std::string> out;
  out.reserve(ids.size());
  for (auto i : ids) out.push_back(token(i));
  return out;
}

}  // namespace copygen::corpus
