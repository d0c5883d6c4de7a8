// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "copygen/error.hpp"
#include "copygen/service/clock.hpp"

namespace copygen::service {

std::int64_t system_now_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

double nearest_rank(std::vector<double> sample, double q) {
  if (sample.empty()) throw Error("no_completed_requests", "percentile of an empty sample");
  if (!(q > 0.0 && q <= 1.0)) throw Error("config_error", "percentile must be in (0, 1]");
  // Guard against 0.99 * 100 landing a hair above 99.
  const double pos = std::ceil(q * static_cast<double>(sample.size()) - 1e-9);
  const auto rank = std::clamp<std::size_t>(static_cast<std::size_t>(pos), 1, sample.size());
  std::nth_element(sample.begin(), sample.begin() + static_cast<std::ptrdiff_t>(rank - 1), sample.end());
  return sample[rank - 1];
}

BenchReport make_report(std::vector<double> latencies_ms, double elapsed_seconds, std::size_t errors) {
  if (latencies_ms.empty()) throw Error("no_completed_requests", "benchmark completed no requests");
  BenchReport r;
  r.requests = latencies_ms.size() + errors;
  r.errors = errors;
  r.average_ms = std::accumulate(latencies_ms.begin(), latencies_ms.end(), 0.0) / static_cast<double>(latencies_ms.size());
  r.max_ms = *std::max_element(latencies_ms.begin(), latencies_ms.end());
  r.tp99_ms = nearest_rank(latencies_ms, 0.99);
  r.qps = elapsed_seconds > 0 ? static_cast<double>(latencies_ms.size()) / elapsed_seconds : 0.0;
  r.latencies_ms = std::move(latencies_ms);
  return r;
}

BenchReport run_bench(const std::function<void(std::size_t)>& request, std::size_t count, std::size_t concurrency) {
  if (count == 0) throw Error("empty_workload", "benchmark needs at least one request");
  concurrency = std::clamp<std::size_t>(concurrency, 1, count);
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> errors{0};
  std::mutex mu;
  std::vector<double> latencies;
  latencies.reserve(count);
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < concurrency; ++w)
    workers.emplace_back([&] {
      std::vector<double> local;
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        const auto t0 = std::chrono::steady_clock::now();
        try {
          request(i);
        } catch (...) {
          ++errors;
          continue;
        }
        local.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
      }
      std::lock_guard lock(mu);
      latencies.insert(latencies.end(), local.begin(), local.end());
    });
  for (auto& t : workers) t.join();
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return make_report(std::move(latencies), elapsed, errors.load());
}

}  // namespace copygen::service
