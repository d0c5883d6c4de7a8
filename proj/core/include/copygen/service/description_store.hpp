// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copygen/service/artifact.hpp"
#include "copygen/service/journal.hpp"

namespace copygen::service {

/// Durable map (sku, model version) -> approved artifact. Writes go through
/// a journal; readers see an immutable snapshot swapped in after each write.
class DescriptionStore {
 public:
  using Key = std::pair<std::string, std::string>;
  using Map = std::map<Key, GenerationArtifact>;

  /// Loads `dir/store.snapshot` and replays `dir/store.journal`.
  explicit DescriptionStore(std::filesystem::path dir);

  /// Throws not_approved unless the artifact state is approved. Returns once
  /// the record is durable; later reads see it.
  void put(const GenerationArtifact& artifact);
  std::optional<GenerationArtifact> get(const std::string& sku, const std::string& model_version) const;
  std::shared_ptr<const Map> snapshot() const;
  std::size_t size() const { return snapshot()->size(); }

  /// Folds the journal into the snapshot file.
  void compact();

  std::uint64_t torn_bytes_on_open() const noexcept { return torn_bytes_; }

 private:
  std::filesystem::path dir_;
  std::mutex write_mu_;
  std::shared_ptr<const Map> current_;
  std::unique_ptr<JournalWriter> journal_;
  std::uint64_t torn_bytes_ = 0;
};

}  // namespace copygen::service
