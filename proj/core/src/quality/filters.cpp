// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/quality/filters.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "copygen/error.hpp"

namespace copygen::quality {

FilterVerdict& FilterVerdict::merge(const FilterVerdict& other) {
  for (const auto& r : other.reasons) reasons.push_back(r);
  accepted = accepted && other.accepted;
  return *this;
}

void TermLexicon::add(const std::string& category, CategoryLexicon lexicon) {
  const std::set<std::string> known(lexicon.terms.begin(), lexicon.terms.end());
  for (const auto& rule : lexicon.forbidden_combinations) {
    if (rule.empty()) throw Error("lexicon_error", "empty forbidden combination in category " + category);
    for (const auto& term : rule) {
      if (!known.count(term)) {
        throw Error("lexicon_error", "rule term '" + term + "' not in the terms of category " + category);
      }
    }
  }
  for (auto& n : lexicon.licensed_numbers) n = normalize_number(n);
  categories_[category] = std::move(lexicon);
}

const CategoryLexicon* TermLexicon::find(const std::string& category) const {
  auto it = categories_.find(category);
  return it == categories_.end() ? nullptr : &it->second;
}

namespace {

bool is_digit(char c) { return c >= '0' && c <= '9'; }
bool is_unit_char(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '%'; }

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Splits a normalised number into its numeric part and unit.
std::pair<std::string, std::string> split_unit(const std::string& n) {
  std::size_t k = 0;
  while (k < n.size() && (is_digit(n[k]) || n[k] == '.')) ++k;
  return {n.substr(0, k), n.substr(k)};
}

}  // namespace

std::string normalize_number(std::string_view token) {
  std::size_t k = 0;
  while (k < token.size() && (is_digit(token[k]) || token[k] == ',' || token[k] == '.')) ++k;
  std::string digits(token.substr(0, k));
  const std::string unit = lower(token.substr(k));
  while (!digits.empty() && (digits.back() == ',' || digits.back() == '.')) digits.pop_back();
  const auto marks = std::count_if(digits.begin(), digits.end(), [](char c) { return c == ',' || c == '.'; });
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    const char c = digits[i];
    if (c != ',' && c != '.') {
      out += c;
      continue;
    }
    // A mark followed by exactly three digits and then another mark or the
    // end groups thousands, unless it is the only mark and a '.'.
    std::size_t run = 0;
    while (i + 1 + run < digits.size() && is_digit(digits[i + 1 + run])) ++run;
    const bool at_group_end = i + 1 + run == digits.size() || !is_digit(digits[i + 1 + run]);
    const bool sole_dot = c == '.' && marks == 1;
    const bool grouping = run == 3 && at_group_end && !sole_dot;
    if (!grouping) out += '.';
  }
  return out + unit;
}

std::vector<NumberToken> extract_numbers(std::string_view text) {
  std::vector<NumberToken> out;
  std::size_t i = 0;
  while (i < text.size()) {
    // Digits glued to a preceding letter ("A4") are part of a model name.
    if (!is_digit(text[i]) || (i > 0 && std::isalpha(static_cast<unsigned char>(text[i - 1])))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() &&
           (is_digit(text[j]) || ((text[j] == ',' || text[j] == '.') && j + 1 < text.size() && is_digit(text[j + 1]))))
      ++j;
    while (j < text.size() && is_unit_char(text[j])) ++j;
    const auto raw = text.substr(i, j - i);
    out.push_back({std::string(raw), normalize_number(raw), i, j});
    i = j;
  }
  return out;
}

FilterVerdict check_terms_numbers(std::string_view description, const corpus::ProductRecord& record,
                                  const TermLexicon& lexicon) {
  FilterVerdict verdict;
  std::string input = record.title;
  for (const auto& a : record.attributes) input += " " + a.name + " " + a.value;
  if (!record.slogan.empty()) input += " " + record.slogan;
  if (record.extra_text) input += " " + *record.extra_text;

  const CategoryLexicon* lex = lexicon.find(record.category);
  if (!lex) verdict.reject({"no_lexicon", record.category, 0, 0});

  std::set<std::string> exact, bare;
  for (const auto& n : extract_numbers(input)) {
    exact.insert(n.normalized);
    bare.insert(split_unit(n.normalized).first);
  }
  if (lex)
    for (const auto& n : lex->licensed_numbers) {
      exact.insert(n);
      bare.insert(split_unit(n).first);
    }
  for (const auto& n : extract_numbers(description)) {
    const auto [value, unit] = split_unit(n.normalized);
    const bool ok = unit.empty() ? bare.count(value) > 0 : exact.count(n.normalized) > 0;
    if (!ok) verdict.reject({"number_mismatch", n.text, n.begin, n.end});
  }

  if (lex) {
    const std::string desc_l = lower(description), input_l = lower(input);
    for (const auto& rule : lex->forbidden_combinations) {
      bool all_in_desc = true, all_in_input = true;
      for (const auto& term : rule) {
        const auto t = lower(term);
        all_in_desc = all_in_desc && desc_l.find(t) != std::string::npos;
        all_in_input = all_in_input && input_l.find(t) != std::string::npos;
      }
      if (!all_in_desc || all_in_input) continue;
      std::string joined;
      for (const auto& term : rule) joined += (joined.empty() ? "" : "+") + term;
      std::size_t begin = description.size(), end = 0;
      for (const auto& term : rule) {
        const auto pos = desc_l.find(lower(term));
        begin = std::min(begin, pos);
        end = std::max(end, pos + term.size());
      }
      verdict.reject({"forbidden_combination", joined, begin, end});
    }
  }
  return verdict;
}

}  // namespace copygen::quality
