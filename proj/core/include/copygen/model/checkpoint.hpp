// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "copygen/corpus/vocab.hpp"
#include "copygen/model/params.hpp"

namespace copygen::model {

inline constexpr std::uint32_t kCheckpointVersion = 1;

enum class StoredPrecision : std::uint8_t { f64 = 1, f32 = 2 };

/// Writes "APCG", version, a length-prefixed JSON config header, the named
/// tensors and a CRC-32 of everything before it. Written to a temporary file
/// and renamed into place.
void save_checkpoint(const ModelParams& params, const std::filesystem::path& path,
                     StoredPrecision precision = StoredPrecision::f64);

/// Throws incompatible_checkpoint on a bad magic, version, checksum or
/// truncation, and vocab_mismatch when `expected_vocab_size` disagrees.
ModelParams load_checkpoint(const std::filesystem::path& path,
                            std::optional<std::size_t> expected_vocab_size = std::nullopt);

/// Parameters together with the vocabulary they were trained against.
struct LoadedModel {
  ModelParams params;
  corpus::Vocab vocab;
  /// Content-derived identifier (checkpoint CRC in hex).
  std::string version;
};

/// Reads `<stem>.apcg` and `<stem>.vocab`.
LoadedModel load_model(const std::filesystem::path& checkpoint_path);
void save_model(const ModelParams& params, const corpus::Vocab& vocab, const std::filesystem::path& checkpoint_path);
std::filesystem::path vocab_path_for(const std::filesystem::path& checkpoint_path);

/// Version string of a checkpoint file without loading the tensors.
std::string checkpoint_version(const std::filesystem::path& path);

}  // namespace copygen::model
