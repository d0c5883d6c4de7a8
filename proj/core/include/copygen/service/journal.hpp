// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace copygen::service {

/// Append-only line file. Each line is "<crc32 hex> <payload>"; append()
/// returns only after the bytes reach the disk.
class JournalWriter {
 public:
  explicit JournalWriter(const std::filesystem::path& path);
  ~JournalWriter();
  JournalWriter(const JournalWriter&) = delete;
  JournalWriter& operator=(const JournalWriter&) = delete;

  /// Payload must not contain a newline.
  void append(std::string_view payload);
  /// Drops all content (after a snapshot has absorbed it).
  void reset();

 private:
  std::filesystem::path path_;
  int fd_ = -1;
};

struct JournalReplay {
  std::vector<std::string> payloads;
  /// Bytes discarded from the end because the last write was torn.
  std::uint64_t torn_bytes = 0;
};

/// Reads valid lines up to the first torn or corrupt one and truncates the
/// file there, so later appends start on a clean boundary.
JournalReplay replay_journal(const std::filesystem::path& path);

/// Writes `content` to a temporary sibling, syncs it and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace copygen::service
