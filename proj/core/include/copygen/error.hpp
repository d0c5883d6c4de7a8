// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace copygen {

/// Exception carrying a stable machine-readable error code (e.g.
/// "input_too_long", "unknown_product") plus a human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& detail)
      : std::runtime_error(detail.empty() ? code : code + ": " + detail),
        code_(std::move(code)) {}

  explicit Error(std::string code) : Error(std::move(code), std::string{}) {}

  const std::string& code() const noexcept { return code_; }

 private:
  std::string code_;
};

}  // namespace copygen
