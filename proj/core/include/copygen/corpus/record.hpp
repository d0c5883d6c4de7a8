// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copygen/corpus/tokenizer.hpp"

namespace copygen::corpus {

struct Attribute {
  std::string name;
  std::string value;

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// One product: title, attribute name/value pairs and slogan as inputs, the
/// written description as the (optional) training target.
struct ProductRecord {
  std::string sku;
  std::string title;
  std::vector<Attribute> attributes;
  std::string slogan;
  std::string category;
  std::optional<std::string> description;
  /// Free text gathered from other sources, such as reviews.
  std::optional<std::string> extra_text;

  friend bool operator==(const ProductRecord&, const ProductRecord&) = default;
};

/// Corpus files hold one JSON object per line.
std::string record_to_json_line(const ProductRecord& record);
ProductRecord record_from_json_line(const std::string& line);
std::vector<ProductRecord> read_records(const std::filesystem::path& path);
void write_records(const std::filesystem::path& path, const std::vector<ProductRecord>& records);

struct LinearizeConfig {
  TokenizeMode mode = TokenizeMode::whitespace;
  /// Emit attributes in a seeded random order instead of sorted by name.
  bool shuffle_attributes = false;
  std::uint64_t seed = 0;
};

/// <title> t <attr> name : value ... <slogan> s <extra> x
std::vector<std::string> linearize_product(const ProductRecord& record, const LinearizeConfig& config = {});

struct CleaningRules {
  std::size_t min_description_chars = 1;
  std::size_t max_description_chars = 2000;
  std::vector<std::string> forbidden_terms;
  bool drop_duplicate_skus = true;
  bool require_description = true;
};

struct Rejection {
  std::string sku;
  std::string reason;
};

struct CleaningReport {
  std::size_t input_count = 0;
  std::size_t kept_count = 0;
  std::map<std::string, std::size_t> rejected_by_reason;
  std::vector<Rejection> rejections;
};

/// Applies rule-based filters. Text fields are whitespace-normalised in the
/// kept records. Reasons: empty_sku, empty_title, duplicate_attribute,
/// missing_description, too_short, too_long, forbidden_term, duplicate_sku.
std::pair<std::vector<ProductRecord>, CleaningReport> clean_corpus(const std::vector<ProductRecord>& records,
                                                                   const CleaningRules& rules);

}  // namespace copygen::corpus
