// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "json_values.hpp"

#include "copygen/error.hpp"

namespace copygen::service {

using nlohmann::json;

std::string_view to_string(Provenance p) { return p == Provenance::cache ? "cache" : "model"; }

std::string_view to_string(ScreeningState s) {
  switch (s) {
    case ScreeningState::pending:
      return "pending";
    case ScreeningState::approved:
      return "approved";
    case ScreeningState::rejected:
      return "rejected";
  }
  return "pending";
}

ScreeningState parse_screening_state(std::string_view name) {
  if (name == "pending") return ScreeningState::pending;
  if (name == "approved") return ScreeningState::approved;
  if (name == "rejected") return ScreeningState::rejected;
  throw Error("format_error", "unknown screening state: " + std::string(name));
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::pv:
      return "pv";
    case EventKind::click:
      return "click";
    case EventKind::purchase:
      return "purchase";
  }
  return "pv";
}

EventKind parse_event_kind(std::string_view name) {
  if (name == "pv") return EventKind::pv;
  if (name == "click") return EventKind::click;
  if (name == "purchase") return EventKind::purchase;
  throw Error("format_error", "unknown event kind: " + std::string(name));
}

namespace {

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error("format_error", e.what());
  }
}

template <typename T, typename Fn>
T guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const json::exception& e) {
    throw Error("format_error", e.what());
  }
}

}  // namespace

namespace detail {

json artifact_value(const GenerationArtifact& a) {
  json candidates = json::array();
  for (const auto& c : a.candidates) candidates.push_back({{"text", c.text}, {"score", c.score}, {"log_prob", c.log_prob}});
  json reasons = json::array();
  for (const auto& r : a.verdict.reasons)
    reasons.push_back({{"rule", r.rule}, {"evidence", r.evidence}, {"begin", r.begin}, {"end", r.end}});
  return {{"id", a.id},
          {"sku", a.sku},
          {"text", a.text},
          {"candidates", candidates},
          {"provenance", to_string(a.provenance)},
          {"model_version", a.model_version},
          {"verdict", {{"accepted", a.verdict.accepted}, {"reasons", reasons}}},
          {"state", to_string(a.state)},
          {"edited_text", a.edited_text ? json(*a.edited_text) : json(nullptr)},
          {"created_ms", a.created_ms},
          {"reviewed_ms", a.reviewed_ms ? json(*a.reviewed_ms) : json(nullptr)},
          {"latency_ms", a.latency_ms}};
}

GenerationArtifact artifact_from_value(const json& v) {
  return guarded<GenerationArtifact>([&] {
    GenerationArtifact a;
    a.id = v.at("id").get<std::string>();
    a.sku = v.at("sku").get<std::string>();
    a.text = v.at("text").get<std::string>();
    for (const auto& c : v.at("candidates"))
      a.candidates.push_back({c.at("text").get<std::string>(), c.at("score").get<double>(), c.at("log_prob").get<double>()});
    a.provenance = v.at("provenance").get<std::string>() == "cache" ? Provenance::cache : Provenance::model;
    a.model_version = v.at("model_version").get<std::string>();
    const auto& verdict = v.at("verdict");
    a.verdict.accepted = verdict.at("accepted").get<bool>();
    for (const auto& r : verdict.at("reasons"))
      a.verdict.reasons.push_back({r.at("rule").get<std::string>(), r.at("evidence").get<std::string>(),
                                   r.at("begin").get<std::size_t>(), r.at("end").get<std::size_t>()});
    a.state = parse_screening_state(v.at("state").get<std::string>());
    if (const auto& e = v.at("edited_text"); !e.is_null()) a.edited_text = e.get<std::string>();
    a.created_ms = v.at("created_ms").get<std::int64_t>();
    if (const auto& r = v.at("reviewed_ms"); !r.is_null()) a.reviewed_ms = r.get<std::int64_t>();
    a.latency_ms = v.value("latency_ms", 0.0);
    return a;
  });
}

json event_value(const EventRecord& r) {
  return {{"ts", r.timestamp_ms}, {"sku", r.sku}, {"event", to_string(r.kind)}, {"bucket", r.bucket}, {"writer", r.writer}};
}

EventRecord event_from_value(const json& v) {
  return guarded<EventRecord>([&] {
    EventRecord r;
    r.timestamp_ms = v.at("ts").get<std::int64_t>();
    r.sku = v.at("sku").get<std::string>();
    r.kind = parse_event_kind(v.at("event").get<std::string>());
    r.bucket = v.value("bucket", std::string{});
    r.writer = v.value("writer", std::string{});
    return r;
  });
}

}  // namespace detail

std::string to_json(const GenerationArtifact& artifact) { return detail::dump(detail::artifact_value(artifact)); }
GenerationArtifact artifact_from_json(const std::string& text) { return detail::artifact_from_value(parse(text)); }
std::string to_json(const EventRecord& record) { return detail::dump(detail::event_value(record)); }
EventRecord event_from_json(const std::string& text) { return detail::event_from_value(parse(text)); }

std::string to_json(const AuditEntry& e) {
  return detail::dump({{"artifact_id", e.artifact_id},
                       {"sku", e.sku},
                       {"from", to_string(e.from)},
                       {"to", to_string(e.to)},
                       {"at_ms", e.at_ms},
                       {"edited", e.edited}});
}

AuditEntry audit_from_json(const std::string& text) {
  const auto v = parse(text);
  return guarded<AuditEntry>([&] {
    AuditEntry e;
    e.artifact_id = v.at("artifact_id").get<std::string>();
    e.sku = v.at("sku").get<std::string>();
    e.from = parse_screening_state(v.at("from").get<std::string>());
    e.to = parse_screening_state(v.at("to").get<std::string>());
    e.at_ms = v.at("at_ms").get<std::int64_t>();
    e.edited = v.at("edited").get<bool>();
    return e;
  });
}

}  // namespace copygen::service
