// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <json.hpp>

#include "copygen/service/artifact.hpp"
#include "copygen/service/event_log.hpp"
#include "copygen/service/screening.hpp"

namespace copygen::service::detail {

nlohmann::json artifact_value(const GenerationArtifact& artifact);
GenerationArtifact artifact_from_value(const nlohmann::json& value);
nlohmann::json event_value(const EventRecord& record);
EventRecord event_from_value(const nlohmann::json& value);

/// Invalid UTF-8 is replaced rather than rejected.
inline std::string dump(const nlohmann::json& value) {
  return value.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

}  // namespace copygen::service::detail
