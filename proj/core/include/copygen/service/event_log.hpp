// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "copygen/service/journal.hpp"

namespace copygen::service {

enum class EventKind { pv, click, purchase };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view name);

struct EventRecord {
  std::int64_t timestamp_ms = 0;
  std::string sku;
  EventKind kind = EventKind::pv;
  std::string bucket;
  std::string writer;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

std::string to_json(const EventRecord& record);
EventRecord event_from_json(const std::string& text);

struct Funnel {
  std::uint64_t pv = 0;
  std::uint64_t clicks = 0;
  std::uint64_t purchases = 0;
};

/// clicks / pv; throws ctr_undefined when pv is 0.
double ctr(const Funnel& f);
/// purchases / clicks; throws cvr_undefined when clicks is 0.
double cvr(const Funnel& f);

/// Append-only event records, optionally journaled to disk.
class EventLog {
 public:
  EventLog() = default;
  explicit EventLog(const std::filesystem::path& path);

  /// All-or-nothing. Throws non_monotone_timestamp if a record is older than
  /// the previous record from the same writer.
  std::size_t append(const std::vector<EventRecord>& records);

  std::vector<EventRecord> records() const;
  std::size_t size() const;

  /// nullopt bucket counts every record.
  Funnel funnel(const std::optional<std::string>& bucket = std::nullopt) const;
  std::map<std::string, Funnel> funnel_by_bucket() const;

 private:
  mutable std::mutex mu_;
  std::vector<EventRecord> records_;
  std::map<std::string, std::int64_t> last_by_writer_;
  std::unique_ptr<JournalWriter> journal_;
};

}  // namespace copygen::service
