// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "copygen/model/checkpoint.hpp"

namespace copygen::service {

/// The serving model. install() swaps atomically; callers that already hold
/// the old pointer finish on it.
class ModelHandle {
 public:
  ModelHandle() = default;
  explicit ModelHandle(std::shared_ptr<const model::LoadedModel> model) : model_(std::move(model)) {}

  std::shared_ptr<const model::LoadedModel> current() const { return std::atomic_load(&model_); }
  void install(std::shared_ptr<const model::LoadedModel> model) { std::atomic_store(&model_, std::move(model)); }
  /// Empty when no model is loaded.
  std::string version() const {
    auto m = current();
    return m ? m->version : std::string{};
  }

 private:
  std::shared_ptr<const model::LoadedModel> model_;
};

}  // namespace copygen::service
