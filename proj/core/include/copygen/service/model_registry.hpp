// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "copygen/model/checkpoint.hpp"
#include "copygen/service/model_handle.hpp"

namespace copygen::service {

/// Directory of versioned checkpoints plus a CURRENT pointer file. A writer
/// publishes; servers poll refresh() and swap when the pointer moves.
class ModelRegistry {
 public:
  explicit ModelRegistry(std::filesystem::path dir);

  /// Stores `<version>.apcg` and `<version>.vocab`, then repoints CURRENT.
  /// Returns the new version.
  std::string publish(const model::ModelParams& params, const corpus::Vocab& vocab);
  /// Repoints CURRENT at an existing checkpoint file inside the registry.
  void activate(const std::string& version);

  std::optional<std::filesystem::path> current_path() const;
  std::shared_ptr<const model::LoadedModel> load_current() const;
  /// Installs the current checkpoint if its version differs from the
  /// handle's. Returns true when a swap happened.
  bool refresh(ModelHandle& handle) const;

  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
};

}  // namespace copygen::service
