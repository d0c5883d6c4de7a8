// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/screening.hpp"

#include <algorithm>

#include "copygen/error.hpp"

namespace copygen::service {

ReviewVerdict parse_review_verdict(std::string_view name) {
  if (name == "approve" || name == "approved") return ReviewVerdict::approve;
  if (name == "reject" || name == "rejected") return ReviewVerdict::reject;
  throw Error("invalid_verdict", "verdict must be approve or reject, got " + std::string(name));
}

std::optional<double> acceptance_rate(const std::vector<AuditEntry>& audit, std::int64_t day) {
  std::size_t approved = 0, reviewed = 0;
  for (const auto& e : audit) {
    if (e.from != ScreeningState::pending || utc_day(e.at_ms) != day) continue;
    ++reviewed;
    approved += e.to == ScreeningState::approved;
  }
  if (reviewed == 0) return std::nullopt;
  return static_cast<double>(approved) / static_cast<double>(reviewed);
}

ScreeningBoard::ScreeningBoard(DescriptionStore& store, Clock clock, const std::filesystem::path& audit_path)
    : store_(store), clock_(std::move(clock)) {
  if (!audit_path.empty()) {
    for (const auto& payload : replay_journal(audit_path).payloads) audit_.push_back(audit_from_json(payload));
    audit_journal_ = std::make_unique<JournalWriter>(audit_path);
  }
}

void ScreeningBoard::add(const GenerationArtifact& artifact) {
  std::lock_guard lock(mu_);
  if (!artifacts_.emplace(artifact.id, artifact).second)
    throw Error("duplicate_artifact", "artifact id already registered: " + artifact.id);
}

std::optional<GenerationArtifact> ScreeningBoard::find(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = artifacts_.find(id);
  if (it == artifacts_.end()) return std::nullopt;
  return it->second;
}

std::size_t ScreeningBoard::submit(const std::string& id) {
  std::lock_guard lock(mu_);
  auto it = artifacts_.find(id);
  if (it == artifacts_.end()) throw Error("unknown_artifact", id);
  const auto& a = it->second;
  if (!a.verdict.accepted) throw Error("not_eligible", "artifact failed the quality filters: " + id);
  if (a.state != ScreeningState::pending) throw Error("already_reviewed", id);
  auto pos = std::find(queue_.begin(), queue_.end(), id);
  if (pos == queue_.end()) {
    queue_.push_back(id);
    return queue_.size();
  }
  return static_cast<std::size_t>(pos - queue_.begin()) + 1;
}

ReviewResult ScreeningBoard::review(const std::string& id, ReviewVerdict verdict,
                                    const std::optional<std::string>& edited_text) {
  std::lock_guard lock(mu_);
  auto it = artifacts_.find(id);
  if (it == artifacts_.end()) throw Error("unknown_artifact", id);
  if (it->second.state != ScreeningState::pending) throw Error("already_reviewed", id);
  auto pos = std::find(queue_.begin(), queue_.end(), id);
  if (pos == queue_.end()) throw Error("not_enqueued", "artifact was never submitted for screening: " + id);

  GenerationArtifact next = it->second;
  const auto now = clock_();
  next.state = verdict == ReviewVerdict::approve ? ScreeningState::approved : ScreeningState::rejected;
  next.reviewed_ms = now;
  const bool edited = verdict == ReviewVerdict::approve && edited_text && *edited_text != next.text;
  if (edited) next.edited_text = *edited_text;
  const AuditEntry entry{id, next.sku, ScreeningState::pending, next.state, now, edited};

  // Durable effects first; in-memory state changes only once both succeed.
  if (next.state == ScreeningState::approved) store_.put(next);
  if (audit_journal_) audit_journal_->append(to_json(entry));
  it->second = next;
  queue_.erase(pos);
  audit_.push_back(entry);
  return {next, acceptance_rate(audit_, utc_day(now))};
}

std::vector<GenerationArtifact> ScreeningBoard::pending(std::size_t limit) const {
  std::lock_guard lock(mu_);
  std::vector<GenerationArtifact> out;
  for (const auto& id : queue_) {
    if (out.size() >= limit) break;
    out.push_back(artifacts_.at(id));
  }
  return out;
}

std::size_t ScreeningBoard::pending_count() const {
  std::lock_guard lock(mu_);
  return queue_.size();
}

std::vector<AuditEntry> ScreeningBoard::audit() const {
  std::lock_guard lock(mu_);
  return audit_;
}

std::optional<double> ScreeningBoard::acceptance_rate_today() const {
  const auto day = utc_day(clock_());
  std::lock_guard lock(mu_);
  return acceptance_rate(audit_, day);
}

}  // namespace copygen::service
