// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/event_log.hpp"

#include "copygen/error.hpp"

namespace copygen::service {

double ctr(const Funnel& f) {
  if (f.pv == 0) throw Error("ctr_undefined", "no page views");
  return static_cast<double>(f.clicks) / static_cast<double>(f.pv);
}

double cvr(const Funnel& f) {
  if (f.clicks == 0) throw Error("cvr_undefined", "no clicks");
  return static_cast<double>(f.purchases) / static_cast<double>(f.clicks);
}

EventLog::EventLog(const std::filesystem::path& path) {
  for (const auto& payload : replay_journal(path).payloads) {
    auto r = event_from_json(payload);
    last_by_writer_[r.writer] = r.timestamp_ms;
    records_.push_back(std::move(r));
  }
  journal_ = std::make_unique<JournalWriter>(path);
}

std::size_t EventLog::append(const std::vector<EventRecord>& records) {
  std::lock_guard lock(mu_);
  auto last = last_by_writer_;
  for (const auto& r : records) {
    auto [it, fresh] = last.try_emplace(r.writer, r.timestamp_ms);
    if (!fresh && r.timestamp_ms < it->second)
      throw Error("non_monotone_timestamp", "writer '" + r.writer + "' went back in time");
    it->second = r.timestamp_ms;
  }
  if (journal_)
    for (const auto& r : records) journal_->append(to_json(r));
  records_.insert(records_.end(), records.begin(), records.end());
  last_by_writer_ = std::move(last);
  return records.size();
}

std::vector<EventRecord> EventLog::records() const {
  std::lock_guard lock(mu_);
  return records_;
}

std::size_t EventLog::size() const {
  std::lock_guard lock(mu_);
  return records_.size();
}

namespace {

void count(Funnel& f, EventKind kind) {
  switch (kind) {
    case EventKind::pv:
      ++f.pv;
      break;
    case EventKind::click:
      ++f.clicks;
      break;
    case EventKind::purchase:
      ++f.purchases;
      break;
  }
}

}  // namespace

Funnel EventLog::funnel(const std::optional<std::string>& bucket) const {
  std::lock_guard lock(mu_);
  Funnel f;
  for (const auto& r : records_)
    if (!bucket || r.bucket == *bucket) count(f, r.kind);
  return f;
}

std::map<std::string, Funnel> EventLog::funnel_by_bucket() const {
  std::lock_guard lock(mu_);
  std::map<std::string, Funnel> out;
  for (const auto& r : records_) count(out[r.bucket], r.kind);
  return out;
}

}  // namespace copygen::service
