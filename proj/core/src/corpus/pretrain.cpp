// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/corpus/pretrain.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <json.hpp>

#include "copygen/error.hpp"

namespace copygen::corpus {

using nlohmann::json;

std::string to_string(Objective objective) {
  switch (objective) {
    case Objective::sentence_reordering:
      return "sr";
    case Objective::pseudo_summary:
      return "psg";
    case Objective::finetune:
      return "finetune";
  }
  return "unknown";
}

Objective parse_objective(const std::string& name) {
  if (name == "sr") return Objective::sentence_reordering;
  if (name == "psg") return Objective::pseudo_summary;
  if (name == "finetune") return Objective::finetune;
  throw Error("config_error", "unknown objective '" + name + "'");
}

std::vector<Sentence> segment(const std::vector<std::string>& tokens, const std::vector<std::size_t>& lengths) {
  std::vector<Sentence> out;
  std::size_t pos = 0;
  for (auto len : lengths) {
    if (pos + len > tokens.size()) throw Error("format_error", "sentence lengths exceed token count");
    out.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(pos),
                     tokens.begin() + static_cast<std::ptrdiff_t>(pos + len));
    pos += len;
  }
  if (pos != tokens.size()) throw Error("format_error", "sentence lengths do not cover all tokens");
  return out;
}

namespace {

std::vector<std::size_t> lengths_for(const Document& doc, std::span<const std::size_t> order) {
  std::vector<std::size_t> out;
  for (auto i : order) out.push_back(doc.sentences[i].size());
  return out;
}

void require_two_sentences(const Document& doc) {
  if (doc.size() < 2) throw Error("too_few_sentences", "document '" + doc.id + "' has " + std::to_string(doc.size()));
}

// C(n, k), saturating at `cap + 1`.
std::size_t bounded_binomial(std::size_t n, std::size_t k, std::size_t cap) {
  k = std::min(k, n - k);
  std::uint64_t acc = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    const std::uint64_t factor = n - k + i;
    if (acc > UINT64_MAX / factor) return cap + 1;
    acc = acc * factor / i;
    if (acc > cap) return cap + 1;
  }
  return static_cast<std::size_t>(acc);
}

std::size_t split_score(const Document& doc, const std::vector<std::size_t>& selected) {
  std::vector<std::size_t> rest;
  for (std::size_t i = 0, j = 0; i < doc.size(); ++i) {
    if (j < selected.size() && selected[j] == i) {
      ++j;
      continue;
    }
    rest.push_back(i);
  }
  return lcs_length(concat_sentences(doc, selected), concat_sentences(doc, rest));
}

// Enumerates k-subsets of {0..m-1} in lexicographic order.
std::pair<std::vector<std::size_t>, std::size_t> exact_selection(const Document& doc, std::size_t k) {
  const std::size_t m = doc.size();
  std::vector<std::size_t> combo(k);
  std::iota(combo.begin(), combo.end(), 0);
  std::vector<std::size_t> best = combo;
  std::size_t best_score = split_score(doc, combo);
  while (true) {
    std::size_t i = k;
    while (i > 0 && combo[i - 1] == m - k + (i - 1)) --i;
    if (i == 0) break;
    ++combo[i - 1];
    for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    const auto score = split_score(doc, combo);
    if (score > best_score) {
      best_score = score;
      best = combo;
    }
  }
  return {best, best_score};
}

std::pair<std::vector<std::size_t>, std::size_t> greedy_selection(const Document& doc, std::size_t k) {
  std::vector<std::size_t> chosen;
  std::size_t score = 0;
  while (chosen.size() < k) {
    std::size_t best_index = doc.size();
    std::size_t best_score = 0;
    for (std::size_t i = 0; i < doc.size(); ++i) {
      if (std::find(chosen.begin(), chosen.end(), i) != chosen.end()) continue;
      auto trial = chosen;
      trial.insert(std::upper_bound(trial.begin(), trial.end(), i), i);
      const auto s = split_score(doc, trial);
      if (best_index == doc.size() || s > best_score) {
        best_index = i;
        best_score = s;
      }
    }
    chosen.insert(std::upper_bound(chosen.begin(), chosen.end(), best_index), best_index);
    score = best_score;
  }
  return {chosen, score};
}

}  // namespace

PretrainExample make_sr_example(const Document& doc, std::uint64_t seed) {
  require_two_sentences(doc);
  numerics::Rng rng(seed);
  std::vector<std::size_t> identity(doc.size());
  std::iota(identity.begin(), identity.end(), 0);
  auto perm = identity;
  do {
    perm = identity;
    rng.shuffle(std::span<std::size_t>(perm));
  } while (perm == identity);

  PretrainExample ex;
  ex.objective = Objective::sentence_reordering;
  ex.document_id = doc.id;
  ex.seed = seed;
  ex.input = concat_sentences(doc, perm);
  ex.input_sentence_lengths = lengths_for(doc, perm);
  ex.target = concat_sentences(doc, identity);
  ex.target_sentence_lengths = lengths_for(doc, identity);
  ex.permutation = std::move(perm);
  return ex;
}

std::size_t psg_selection_size(std::size_t m) {
  // round-half-up(m / 4) == floor((m + 2) / 4) for non-negative integers.
  return std::max<std::size_t>(1, (m + 2) / 4);
}

PretrainExample make_psg_example(const Document& doc, const PsgConfig& config) {
  require_two_sentences(doc);
  const std::size_t m = doc.size();
  const std::size_t k = psg_selection_size(m);
  const bool exact = bounded_binomial(m, k, config.exact_subset_limit) <= config.exact_subset_limit;
  auto [selected, score] = exact ? exact_selection(doc, k) : greedy_selection(doc, k);

  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < m; ++i)
    if (!std::binary_search(selected.begin(), selected.end(), i)) rest.push_back(i);

  PretrainExample ex;
  ex.objective = Objective::pseudo_summary;
  ex.document_id = doc.id;
  ex.exact_selection = exact;
  ex.selection_score = score;
  auto short_part = concat_sentences(doc, selected);
  auto long_part = concat_sentences(doc, rest);
  auto short_lengths = lengths_for(doc, selected);
  auto long_lengths = lengths_for(doc, rest);
  if (config.reverse) {
    ex.input = std::move(long_part);
    ex.input_sentence_lengths = std::move(long_lengths);
    ex.target = std::move(short_part);
    ex.target_sentence_lengths = std::move(short_lengths);
  } else {
    ex.input = std::move(short_part);
    ex.input_sentence_lengths = std::move(short_lengths);
    ex.target = std::move(long_part);
    ex.target_sentence_lengths = std::move(long_lengths);
  }
  ex.selected = std::move(selected);
  ex.remainder = std::move(rest);
  return ex;
}

void write_pretrain_examples(const std::filesystem::path& path, const std::vector<PretrainExample>& examples) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write " + path.string());
  for (const auto& ex : examples) {
    json meta = {{"document_id", ex.document_id},
                 {"seed", ex.seed},
                 {"input_sentence_lengths", ex.input_sentence_lengths},
                 {"target_sentence_lengths", ex.target_sentence_lengths}};
    if (ex.objective == Objective::sentence_reordering) meta["permutation"] = ex.permutation;
    if (ex.objective == Objective::pseudo_summary) {
      meta["selected"] = ex.selected;
      meta["remainder"] = ex.remainder;
      meta["selection_score"] = ex.selection_score;
      meta["exact_selection"] = ex.exact_selection;
    }
    json line = {{"input", ex.input}, {"target", ex.target}, {"objective", to_string(ex.objective)}, {"meta", meta}};
    out << line.dump() << '\n';
  }
}

std::vector<PretrainExample> read_pretrain_examples(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot read " + path.string());
  std::vector<PretrainExample> out;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto obj = json::parse(line);
      PretrainExample ex;
      ex.input = obj.at("input").get<std::vector<std::string>>();
      ex.target = obj.at("target").get<std::vector<std::string>>();
      ex.objective = parse_objective(obj.at("objective").get<std::string>());
      const auto& meta = obj.at("meta");
      ex.document_id = meta.value("document_id", std::string{});
      ex.seed = meta.value("seed", std::uint64_t{0});
      ex.input_sentence_lengths = meta.value("input_sentence_lengths", std::vector<std::size_t>{});
      ex.target_sentence_lengths = meta.value("target_sentence_lengths", std::vector<std::size_t>{});
      ex.permutation = meta.value("permutation", std::vector<std::size_t>{});
      ex.selected = meta.value("selected", std::vector<std::size_t>{});
      ex.remainder = meta.value("remainder", std::vector<std::size_t>{});
      ex.selection_score = meta.value("selection_score", std::size_t{0});
      ex.exact_selection = meta.value("exact_selection", false);
      out.push_back(std::move(ex));
    } catch (const std::exception& e) {
      throw Error("corpus_format", path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace copygen::corpus
