// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/quality/report.hpp"

#include <cstdio>

#include "copygen/error.hpp"

namespace copygen::quality {

std::array<double, 9> MetricScores::columns() const {
  return {sacre_bleu, rouge1, rouge2, rougeL, bleu[0], bleu[1], bleu[2], bleu[3], meteor};
}

MetricScores score_item(std::string_view candidate_text, const Tokens& candidate, std::string_view reference_text,
                        const Tokens& reference) {
  MetricScores s;
  const std::string ref_text(reference_text);
  s.sacre_bleu = sacre_bleu(candidate_text, std::span<const std::string>(&ref_text, 1));
  s.rouge1 = rouge(candidate, reference, RougeVariant::rouge1).f1;
  s.rouge2 = rouge(candidate, reference, RougeVariant::rouge2).f1;
  s.rougeL = rouge(candidate, reference, RougeVariant::rougeL).f1;
  const std::span<const Tokens> refs(&reference, 1);
  for (std::size_t n = 1; n <= 4; ++n) s.bleu[n - 1] = bleu(candidate, refs, n);
  s.meteor = meteor_lite(candidate, reference);
  return s;
}

MetricRow evaluate_corpus(std::string model, std::span<const std::string> candidate_texts,
                          std::span<const Tokens> candidates, std::span<const std::string> reference_texts,
                          std::span<const Tokens> references) {
  const std::size_t n = candidates.size();
  if (n == 0 || candidate_texts.size() != n || reference_texts.size() != n || references.size() != n) {
    throw Error("shape_error", "evaluation lists must be nonempty and of equal length");
  }
  MetricRow row;
  row.model = std::move(model);
  BleuStats word, standard;
  for (std::size_t i = 0; i < n; ++i) {
    row.items.push_back(score_item(candidate_texts[i], candidates[i], reference_texts[i], references[i]));
    word += bleu_stats(candidates[i], std::span<const Tokens>(&references[i], 1));
    const Tokens std_ref = standard_tokenize(reference_texts[i]);
    standard += bleu_stats(standard_tokenize(candidate_texts[i]), std::span<const Tokens>(&std_ref, 1));
  }
  auto& c = row.corpus;
  c.sacre_bleu = bleu_from_stats(standard, 4);
  for (std::size_t k = 1; k <= 4; ++k) c.bleu[k - 1] = bleu_from_stats(word, k);
  for (const auto& it : row.items) {
    c.rouge1 += it.rouge1;
    c.rouge2 += it.rouge2;
    c.rougeL += it.rougeL;
    c.meteor += it.meteor;
  }
  const double inv = 1.0 / static_cast<double>(n);
  c.rouge1 *= inv;
  c.rouge2 *= inv;
  c.rougeL *= inv;
  c.meteor *= inv;
  return row;
}

std::string format_table(std::span<const MetricRow> rows, char delimiter) {
  std::string out = "Model";
  for (auto col : kMetricColumns) (out += delimiter) += col;
  out += '\n';
  for (const auto& r : rows) {
    out += r.model;
    for (double v : r.corpus.columns()) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.2f", 100.0 * v);
      (out += delimiter) += buf;
    }
    out += '\n';
  }
  return out;
}

}  // namespace copygen::quality
