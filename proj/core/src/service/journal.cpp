// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/journal.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "copygen/error.hpp"

namespace copygen::service {
namespace {

std::uint32_t crc_of(std::string_view s) {
  return static_cast<std::uint32_t>(
      crc32(0L, reinterpret_cast<const Bytef*>(s.data()), static_cast<uInt>(s.size())));
}

[[noreturn]] void io_error(const std::filesystem::path& path, const char* what) {
  throw Error("io_error", std::string(what) + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view bytes, const std::filesystem::path& path) {
  while (!bytes.empty()) {
    const auto n = ::write(fd, bytes.data(), bytes.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      io_error(path, "write");
    }
    bytes.remove_prefix(static_cast<std::size_t>(n));
  }
}

void sync_directory(const std::filesystem::path& dir) {
  const int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

JournalWriter::JournalWriter(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd_ < 0) io_error(path, "open");
}

JournalWriter::~JournalWriter() {
  if (fd_ >= 0) ::close(fd_);
}

void JournalWriter::append(std::string_view payload) {
  if (payload.find('\n') != std::string_view::npos) throw Error("format_error", "journal payload contains a newline");
  char crc[9];
  std::snprintf(crc, sizeof crc, "%08x", crc_of(payload));
  std::string line;
  line.reserve(payload.size() + 10);
  line.append(crc, 8).append(1, ' ').append(payload).append(1, '\n');
  write_all(fd_, line, path_);
  if (::fdatasync(fd_) != 0) io_error(path_, "sync");
}

void JournalWriter::reset() {
  if (::ftruncate(fd_, 0) != 0) io_error(path_, "truncate");
  if (::fsync(fd_) != 0) io_error(path_, "sync");
}

JournalReplay replay_journal(const std::filesystem::path& path) {
  JournalReplay out;
  std::ifstream in(path, std::ios::binary);
  if (!in) return out;
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string data = buf.str();
  std::size_t pos = 0;
  while (pos < data.size()) {
    const auto nl = data.find('\n', pos);
    if (nl == std::string::npos) break;
    const std::string_view line(data.data() + pos, nl - pos);
    if (line.size() < 9 || line[8] != ' ') break;
    const auto payload = line.substr(9);
    char crc[9];
    std::snprintf(crc, sizeof crc, "%08x", crc_of(payload));
    if (line.substr(0, 8) != std::string_view(crc, 8)) break;
    out.payloads.emplace_back(payload);
    pos = nl + 1;
  }
  if (pos < data.size()) {
    out.torn_bytes = data.size() - pos;
    std::filesystem::resize_file(path, pos);
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) io_error(tmp, "open");
  try {
    write_all(fd, content, tmp);
    if (::fsync(fd) != 0) io_error(tmp, "sync");
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::filesystem::rename(tmp, path);
  sync_directory(path.parent_path());
}

}  // namespace copygen::service
