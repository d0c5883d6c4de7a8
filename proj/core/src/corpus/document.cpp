// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/corpus/document.hpp"

#include <algorithm>
#include <array>

#include "copygen/error.hpp"

namespace copygen::corpus {

namespace {

constexpr std::array<std::string_view, 7> kTerminators = {".", "?", "!", "\xE3\x80\x82" /* 。 */,
                                                          "\xEF\xBC\x9F" /* ？ */, "\xEF\xBC\x81" /* ！ */,
                                                          "\xEF\xBC\x8E" /* ． */};

bool is_terminator(std::string_view cp) {
  return std::find(kTerminators.begin(), kTerminators.end(), cp) != kTerminators.end();
}

bool has_content(std::string_view fragment) {
  for (const auto& cp : utf8_code_points(fragment)) {
    if (is_terminator(cp)) continue;
    if (cp.size() == 1 && (cp[0] == ' ' || cp[0] == '\t' || cp[0] == '\n' || cp[0] == '\r')) continue;
    return true;
  }
  return false;
}

}  // namespace

Document split_sentences(std::string_view text, TokenizeMode mode, std::string id) {
  Document doc;
  doc.id = std::move(id);
  const auto cps = utf8_code_points(text);
  std::string current;
  auto flush = [&] {
    if (has_content(current)) {
      auto tokens = tokenize(current, mode);
      if (!tokens.empty()) doc.sentences.push_back(std::move(tokens));
    }
    current.clear();
  };
  for (std::size_t i = 0; i < cps.size(); ++i) {
    current += cps[i];
    if (is_terminator(cps[i])) {
      // Keep runs like "?!" or "..." attached to the sentence they close.
      while (i + 1 < cps.size() && is_terminator(cps[i + 1])) current += cps[++i];
      flush();
    }
  }
  flush();
  if (doc.sentences.empty()) throw Error("empty_document", "no sentence content");
  return doc;
}

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

std::vector<std::string> concat_sentences(const Document& doc, std::span<const std::size_t> order) {
  std::vector<std::string> out;
  for (auto i : order) {
    const auto& s = doc.sentences.at(i);
    out.insert(out.end(), s.begin(), s.end());
  }
  return out;
}

}  // namespace copygen::corpus
