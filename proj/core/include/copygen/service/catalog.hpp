// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "copygen/corpus/record.hpp"

namespace copygen::service {

/// Product records by sku.
class Catalog {
 public:
  Catalog() = default;
  explicit Catalog(const std::vector<corpus::ProductRecord>& records);
  static Catalog load(const std::filesystem::path& path);

  void upsert(const corpus::ProductRecord& record);
  std::optional<corpus::ProductRecord> find(const std::string& sku) const;
  std::size_t size() const;
  std::vector<std::string> skus() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<std::string, corpus::ProductRecord> records_;
};

}  // namespace copygen::service
