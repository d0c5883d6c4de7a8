// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/quality/grammar.hpp"

#include <cctype>
#include <set>

#include "copygen/corpus/document.hpp"
#include "copygen/error.hpp"

namespace copygen::quality {

namespace {

bool is_punctuation(const std::string& cp) {
  if (cp.size() == 1) return std::ispunct(static_cast<unsigned char>(cp[0])) != 0;
  static const std::set<std::string> wide = {"。", "，", "、", "；", "：", "？", "！", "“", "”", "‘", "’",
                                             "（", "）", "《", "》", "…", "\u2014", "．", "【", "】"};
  return wide.count(cp) > 0;
}

bool is_space(const std::string& cp) {
  return cp == " " || cp == "\t" || cp == "\n" || cp == "\r" || cp == "　";
}

}  // namespace

FeatureVector grammar_features(std::string_view text, const corpus::Vocab* vocab, corpus::TokenizeMode mode) {
  FeatureVector f(kGrammarFeatureCount, 0.0);
  const auto tokens = corpus::tokenize(text, mode);
  if (tokens.empty()) return f;
  const double n = static_cast<double>(tokens.size());
  f[kLength] = n;
  f[kTypeTokenRatio] = static_cast<double>(std::set<std::string>(tokens.begin(), tokens.end()).size()) / n;

  std::size_t run = 1, best = 1;
  for (std::size_t i = 1; i < tokens.size(); ++i) {
    run = tokens[i] == tokens[i - 1] ? run + 1 : 1;
    best = std::max(best, run);
  }
  f[kMaxRepeatRun] = static_cast<double>(best);

  if (tokens.size() >= 2) {
    std::set<std::pair<std::string, std::string>> seen;
    std::size_t repeats = 0;
    for (std::size_t i = 1; i < tokens.size(); ++i)
      if (!seen.emplace(tokens[i - 1], tokens[i]).second) ++repeats;
    f[kRepeatedBigramRatio] = static_cast<double>(repeats) / static_cast<double>(tokens.size() - 1);
  }

  std::size_t punct = 0, visible = 0;
  for (const auto& cp : corpus::utf8_code_points(text)) {
    if (is_space(cp)) continue;
    ++visible;
    if (is_punctuation(cp)) ++punct;
  }
  f[kPunctuationDensity] = visible ? static_cast<double>(punct) / static_cast<double>(visible) : 0.0;

  if (vocab) {
    std::size_t oov = 0;
    for (const auto& t : tokens)
      if (!vocab->contains(t)) ++oov;
    f[kOovFraction] = static_cast<double>(oov) / n;
  }

  try {
    const auto doc = corpus::split_sentences(text, mode, "");
    f[kMeanSentenceLength] = n / static_cast<double>(doc.sentences.size());
  } catch (const Error&) {
    f[kMeanSentenceLength] = n;
  }
  return f;
}

FilterVerdict grammar_filter(std::string_view description, const StumpEnsemble& ensemble, double threshold,
                             const corpus::Vocab* vocab, corpus::TokenizeMode mode) {
  if (ensemble.stumps.empty()) throw Error("empty_ensemble", "grammar filter needs a trained ensemble");
  FilterVerdict v;
  const double margin = ensemble.margin(grammar_features(description, vocab, mode));
  if (margin < threshold) v.reject({"grammar", "margin " + std::to_string(margin), 0, description.size()});
  return v;
}

}  // namespace copygen::quality
