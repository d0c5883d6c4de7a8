// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace copygen::service {

struct BenchReport {
  std::size_t requests = 0;
  std::size_t errors = 0;
  double qps = 0.0;
  double average_ms = 0.0;
  double tp99_ms = 0.0;
  double max_ms = 0.0;
  std::vector<double> latencies_ms;
};

/// Nearest-rank percentile: the ceil(q * n)-th smallest value, q in (0, 1].
double nearest_rank(std::vector<double> sample, double q);

/// Builds a report from recorded latencies of completed requests. Throws
/// no_completed_requests for an empty sample.
BenchReport make_report(std::vector<double> latencies_ms, double elapsed_seconds, std::size_t errors);

/// Runs `request(i)` for i in [0, count) on `concurrency` threads. A throwing
/// request counts as an error and contributes no latency.
BenchReport run_bench(const std::function<void(std::size_t)>& request, std::size_t count, std::size_t concurrency);

}  // namespace copygen::service
