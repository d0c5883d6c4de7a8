// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>

namespace copygen::service {

/// Milliseconds since the Unix epoch, UTC.
using Clock = std::function<std::int64_t()>;

std::int64_t system_now_ms();
inline Clock system_clock() { return &system_now_ms; }

/// Days since the epoch; the acceptance-rate day boundary.
constexpr std::int64_t utc_day(std::int64_t ms) {
  constexpr std::int64_t kDay = 86'400'000;
  return ms >= 0 ? ms / kDay : (ms - kDay + 1) / kDay;
}

}  // namespace copygen::service
