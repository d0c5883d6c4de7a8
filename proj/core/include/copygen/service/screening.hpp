// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "copygen/service/artifact.hpp"
#include "copygen/service/clock.hpp"
#include "copygen/service/description_store.hpp"
#include "copygen/service/journal.hpp"

namespace copygen::service {

enum class ReviewVerdict { approve, reject };
ReviewVerdict parse_review_verdict(std::string_view name);

struct AuditEntry {
  std::string artifact_id;
  std::string sku;
  ScreeningState from = ScreeningState::pending;
  ScreeningState to = ScreeningState::pending;
  std::int64_t at_ms = 0;
  bool edited = false;

  friend bool operator==(const AuditEntry&, const AuditEntry&) = default;
};

std::string to_json(const AuditEntry& entry);
AuditEntry audit_from_json(const std::string& text);

/// approved / (approved + rejected) over transitions on the given UTC day;
/// nullopt when nothing was reviewed.
std::optional<double> acceptance_rate(const std::vector<AuditEntry>& audit, std::int64_t day);

struct ReviewResult {
  GenerationArtifact artifact;
  std::optional<double> acceptance_rate_today;
};

/// Holds generated artifacts, the human-screening queue and the audit trail.
/// Approvals are written to the description store before the transition is
/// acknowledged.
class ScreeningBoard {
 public:
  /// `audit_path` may be empty for an in-memory trail.
  ScreeningBoard(DescriptionStore& store, Clock clock, const std::filesystem::path& audit_path = {});

  void add(const GenerationArtifact& artifact);
  std::optional<GenerationArtifact> find(const std::string& id) const;

  /// 1-based queue position. Idempotent. Throws unknown_artifact,
  /// not_eligible (filter-rejected) or already_reviewed.
  std::size_t submit(const std::string& id);

  /// Throws unknown_artifact, already_reviewed, or not_enqueued.
  ReviewResult review(const std::string& id, ReviewVerdict verdict,
                      const std::optional<std::string>& edited_text = std::nullopt);

  std::vector<GenerationArtifact> pending(std::size_t limit) const;
  std::size_t pending_count() const;
  std::vector<AuditEntry> audit() const;
  std::optional<double> acceptance_rate_today() const;

 private:
  DescriptionStore& store_;
  Clock clock_;
  mutable std::mutex mu_;
  std::map<std::string, GenerationArtifact> artifacts_;
  std::deque<std::string> queue_;
  std::vector<AuditEntry> audit_;
  std::unique_ptr<JournalWriter> audit_journal_;
};

}  // namespace copygen::service
