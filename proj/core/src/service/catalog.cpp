// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/catalog.hpp"

#include <mutex>

namespace copygen::service {

Catalog::Catalog(const std::vector<corpus::ProductRecord>& records) {
  for (const auto& r : records) records_[r.sku] = r;
}

Catalog Catalog::load(const std::filesystem::path& path) { return Catalog(corpus::read_records(path)); }

void Catalog::upsert(const corpus::ProductRecord& record) {
  std::unique_lock lock(mu_);
  records_[record.sku] = record;
}

std::optional<corpus::ProductRecord> Catalog::find(const std::string& sku) const {
  std::shared_lock lock(mu_);
  auto it = records_.find(sku);
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

std::size_t Catalog::size() const {
  std::shared_lock lock(mu_);
  return records_.size();
}

std::vector<std::string> Catalog::skus() const {
  std::shared_lock lock(mu_);
  std::vector<std::string> out;
  for (const auto& [sku, r] : records_) out.push_back(sku);
  return out;
}

}  // namespace copygen::service
