// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "copygen/corpus/record.hpp"

namespace copygen::quality {

/// One failed rule. `begin`/`end` are byte offsets into the checked text.
struct Reason {
  std::string rule;
  std::string evidence;
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const Reason&, const Reason&) = default;
};

struct FilterVerdict {
  bool accepted = true;
  std::vector<Reason> reasons;

  void reject(Reason reason) {
    accepted = false;
    reasons.push_back(std::move(reason));
  }
  /// Union of two verdicts; accepted only if both are.
  FilterVerdict& merge(const FilterVerdict& other);

  friend bool operator==(const FilterVerdict&, const FilterVerdict&) = default;
};

struct CategoryLexicon {
  std::vector<std::string> terms;
  /// Each rule is a set of terms that must not all appear together unless
  /// they all appear in the input as well.
  std::vector<std::vector<std::string>> forbidden_combinations;
  /// Numbers (normalised) that descriptions in this category may always use.
  std::vector<std::string> licensed_numbers;
};

class TermLexicon {
 public:
  /// Throws lexicon_error if a rule names a term not in `terms`.
  void add(const std::string& category, CategoryLexicon lexicon);
  const CategoryLexicon* find(const std::string& category) const;
  std::size_t size() const noexcept { return categories_.size(); }
  const std::map<std::string, CategoryLexicon>& categories() const noexcept { return categories_; }

  /// One JSON object file per category with keys terms,
  /// forbidden_combinations and licensed_numbers.
  static CategoryLexicon load_file(const std::filesystem::path& path);
  void save_file(const std::string& category, const std::filesystem::path& path) const;
  /// Every `<category>.json` in `dir`.
  static TermLexicon load_directory(const std::filesystem::path& dir);

 private:
  std::map<std::string, CategoryLexicon> categories_;
};

/// A number token found in text, with its normalised form.
struct NumberToken {
  std::string text;
  std::string normalized;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Digit runs with optional grouping/decimal marks and an attached unit.
/// Normalisation drops thousands separators, writes the decimal mark as '.',
/// and lowercases the unit.
std::vector<NumberToken> extract_numbers(std::string_view text);
std::string normalize_number(std::string_view token);

/// Number and forbidden-combination checks. Reasons: number_mismatch,
/// forbidden_combination, no_lexicon (category missing; numbers are still
/// checked against the input).
FilterVerdict check_terms_numbers(std::string_view description, const corpus::ProductRecord& record,
                                  const TermLexicon& lexicon);

}  // namespace copygen::quality
