// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/corpus/record.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>

#include <json.hpp>

#include "copygen/corpus/vocab.hpp"
#include "copygen/error.hpp"
#include "copygen/numerics/rng.hpp"

namespace copygen::corpus {

using nlohmann::json;

namespace {

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

std::optional<std::string> read_optional(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return it->get<std::string>();
}

std::string read_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return {};
  return it->get<std::string>();
}

void append_tokens(std::vector<std::string>& out, std::string_view text, TokenizeMode mode) {
  for (auto& t : tokenize(text, mode)) out.push_back(std::move(t));
}

}  // namespace

std::string record_to_json_line(const ProductRecord& r) {
  json attrs = json::array();
  for (const auto& a : r.attributes) attrs.push_back({{"k", a.name}, {"v", a.value}});
  json obj = {{"sku", r.sku},
              {"title", r.title},
              {"attrs", attrs},
              {"slogan", r.slogan},
              {"category", r.category},
              {"description", optional_string(r.description)},
              {"extra_text", optional_string(r.extra_text)}};
  return obj.dump();
}

ProductRecord record_from_json_line(const std::string& line) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::exception& e) {
    throw Error("corpus_format", e.what());
  }
  if (!obj.is_object()) throw Error("corpus_format", "record is not an object");
  try {
    ProductRecord r;
    r.sku = read_string(obj, "sku");
    r.title = read_string(obj, "title");
    r.slogan = read_string(obj, "slogan");
    r.category = read_string(obj, "category");
    r.description = read_optional(obj, "description");
    r.extra_text = read_optional(obj, "extra_text");
    if (auto it = obj.find("attrs"); it != obj.end() && !it->is_null()) {
      for (const auto& a : *it) r.attributes.push_back({a.at("k").get<std::string>(), a.at("v").get<std::string>()});
    }
    return r;
  } catch (const json::exception& e) {
    throw Error("corpus_format", e.what());
  }
}

std::vector<ProductRecord> read_records(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot read corpus " + path.string());
  std::vector<ProductRecord> records;
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      records.push_back(record_from_json_line(line));
    } catch (const Error& e) {
      throw Error("corpus_format", path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

void write_records(const std::filesystem::path& path, const std::vector<ProductRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("io_error", "cannot write corpus " + path.string());
  for (const auto& r : records) out << record_to_json_line(r) << '\n';
}

std::vector<std::string> linearize_product(const ProductRecord& record, const LinearizeConfig& config) {
  if (normalize_whitespace(record.title).empty()) throw Error("empty_title", "record '" + record.sku + "'");

  std::vector<std::size_t> order(record.attributes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return record.attributes[a].name < record.attributes[b].name;
  });
  if (config.shuffle_attributes) {
    numerics::Rng rng(config.seed);
    rng.shuffle(std::span<std::size_t>(order));
  }

  std::vector<std::string> out;
  out.emplace_back(kSpecialTokens[id_of(Special::title)]);
  append_tokens(out, record.title, config.mode);
  for (auto i : order) {
    out.emplace_back(kSpecialTokens[id_of(Special::attr)]);
    append_tokens(out, record.attributes[i].name, config.mode);
    out.emplace_back(":");
    append_tokens(out, record.attributes[i].value, config.mode);
  }
  if (!normalize_whitespace(record.slogan).empty()) {
    out.emplace_back(kSpecialTokens[id_of(Special::slogan)]);
    append_tokens(out, record.slogan, config.mode);
  }
  if (record.extra_text && !normalize_whitespace(*record.extra_text).empty()) {
    out.emplace_back(kSpecialTokens[id_of(Special::extra)]);
    append_tokens(out, *record.extra_text, config.mode);
  }
  return out;
}

std::pair<std::vector<ProductRecord>, CleaningReport> clean_corpus(const std::vector<ProductRecord>& records,
                                                                   const CleaningRules& rules) {
  CleaningReport report;
  report.input_count = records.size();
  std::vector<ProductRecord> kept;
  std::set<std::string> kept_skus;

  auto reject = [&](const ProductRecord& r, const std::string& reason) {
    ++report.rejected_by_reason[reason];
    report.rejections.push_back({r.sku, reason});
  };

  for (const auto& raw : records) {
    ProductRecord r = raw;
    r.sku = normalize_whitespace(r.sku);
    r.title = normalize_whitespace(r.title);
    r.slogan = normalize_whitespace(r.slogan);
    for (auto& a : r.attributes) {
      a.name = normalize_whitespace(a.name);
      a.value = normalize_whitespace(a.value);
    }
    if (r.description) r.description = normalize_whitespace(*r.description);
    if (r.extra_text) r.extra_text = normalize_whitespace(*r.extra_text);

    if (r.sku.empty()) {
      reject(r, "empty_sku");
      continue;
    }
    if (r.title.empty()) {
      reject(r, "empty_title");
      continue;
    }
    std::set<std::string> names;
    bool duplicate_attr = false;
    for (const auto& a : r.attributes) duplicate_attr = duplicate_attr || !names.insert(a.name).second;
    if (duplicate_attr) {
      reject(r, "duplicate_attribute");
      continue;
    }
    if (r.description && r.description->empty()) r.description.reset();
    if (!r.description && rules.require_description) {
      reject(r, "missing_description");
      continue;
    }
    if (r.description) {
      const auto chars = utf8_length(*r.description);
      if (chars < rules.min_description_chars) {
        reject(r, "too_short");
        continue;
      }
      if (chars > rules.max_description_chars) {
        reject(r, "too_long");
        continue;
      }
      const bool forbidden = std::any_of(rules.forbidden_terms.begin(), rules.forbidden_terms.end(), [&](const auto& term) {
        return !term.empty() && r.description->find(term) != std::string::npos;
      });
      if (forbidden) {
        reject(r, "forbidden_term");
        continue;
      }
    }
    if (rules.drop_duplicate_skus && kept_skus.count(r.sku)) {
      reject(r, "duplicate_sku");
      continue;
    }
    kept_skus.insert(r.sku);
    kept.push_back(std::move(r));
  }
  report.kept_count = kept.size();
  return {std::move(kept), std::move(report)};
}

}  // namespace copygen::corpus
