// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace copygen::cli {

/// Everything under the data directory has a fixed place.
struct DataLayout {
  std::filesystem::path root;

  std::filesystem::path models() const { return root / "models"; }
  std::filesystem::path store() const { return root / "store"; }
  std::filesystem::path audit() const { return root / "audit.journal"; }
  std::filesystem::path events() const { return root / "events.journal"; }
  std::filesystem::path lexicon() const { return root / "lexicon"; }
  std::filesystem::path grammar() const { return root / "grammar.txt"; }
  std::filesystem::path catalog() const { return root / "catalog.jsonl"; }
  std::filesystem::path vocab() const { return root / "vocab.txt"; }
};

/// COPYGEN_DATA_DIR, default ./copygen-data.
DataLayout data_layout_from_env();
/// COPYGEN_LISTEN as host:port, default 127.0.0.1:8080.
std::pair<std::string, int> listen_address_from_env();

struct CleanArgs {
  std::filesystem::path input;
  std::filesystem::path output;
  std::size_t min_chars = 1;
  std::size_t max_chars = 2000;
  std::vector<std::string> forbidden;
  bool keep_unlabelled = false;
};

struct BuildArgs {
  std::filesystem::path records;
  std::optional<std::filesystem::path> documents;
  std::filesystem::path output;
  std::optional<std::filesystem::path> vocab_out;
  std::string objective = "mixed";
  std::size_t min_freq = 1;
  std::size_t max_vocab = 30000;
  std::uint64_t seed = 1;
  std::string mode = "whitespace";
  bool psg_reverse = false;
};

struct ModelArgs {
  std::size_t d_model = 64;
  std::size_t heads = 4;
  std::size_t encoder_layers = 2;
  std::size_t decoder_layers = 2;
  std::size_t ff_width = 128;
  std::size_t max_positions = 256;
  double dropout = 0.0;
  bool no_pointer = false;
};

struct TrainArgs {
  std::size_t epochs = 10;
  std::size_t batch_size = 8;
  double learning_rate = 1e-3;
  double clip_norm = 1.0;
  std::uint64_t seed = 1;
  bool pointer_off_in_pretraining = false;
};

struct PretrainArgs {
  std::string objective = "mixed";
  std::filesystem::path data;
  std::optional<std::filesystem::path> vocab;
  std::optional<std::filesystem::path> init;
  std::filesystem::path output;
  ModelArgs model;
  TrainArgs train;
};

struct FinetuneArgs {
  std::filesystem::path records;
  std::optional<std::filesystem::path> init;
  std::optional<std::filesystem::path> vocab;
  /// Empty: publish into the model registry.
  std::optional<std::filesystem::path> output;
  std::string mode = "whitespace";
  ModelArgs model;
  TrainArgs train;
};

struct ServiceArgs {
  std::optional<std::filesystem::path> model;
  std::optional<std::filesystem::path> catalog;
  std::size_t beam_size = 4;
  std::size_t max_len = 64;
  double length_alpha = 0.7;
  bool no_repeat_trigram = false;
  double grammar_threshold = 0.0;
  bool require_lexicon = false;
  std::string mode = "whitespace";
};

struct GenerateArgs {
  ServiceArgs service;
  std::optional<std::string> sku;
  std::optional<std::string> record_json;
};

struct BatchArgs {
  ServiceArgs service;
  std::vector<std::string> skus;
  bool all = false;
};

struct EvalArgs {
  std::filesystem::path records;
  /// "name=path" or a bare path (name = file stem).
  std::vector<std::string> models;
  std::size_t beam_size = 4;
  std::size_t max_len = 64;
  double length_alpha = 0.7;
  std::string mode = "whitespace";
  char delimiter = '\t';
};

struct ServeArgs {
  ServiceArgs service;
  double poll_seconds = 2.0;
};

struct BenchArgs {
  ServiceArgs service;
  std::size_t requests = 100;
  std::size_t concurrency = 1;
  bool cached = false;
  std::optional<std::filesystem::path> inject;
};

struct GrammarArgs {
  std::filesystem::path good;
  std::filesystem::path bad;
  std::size_t rounds = 50;
  std::optional<std::filesystem::path> output;
};

struct RetrainArgs {
  std::filesystem::path records;
  std::size_t min_chars = 1;
  std::size_t max_chars = 2000;
  std::string mode = "whitespace";
  TrainArgs train;
};

int run_clean(const CleanArgs& args);
int run_build(const BuildArgs& args);
int run_pretrain(const PretrainArgs& args);
int run_finetune(const FinetuneArgs& args);
int run_generate(const GenerateArgs& args);
int run_batch(const BatchArgs& args);
int run_eval(const EvalArgs& args);
int run_serve(const ServeArgs& args);
int run_bench(const BenchArgs& args);
int run_grammar_train(const GrammarArgs& args);
int run_retrain(const RetrainArgs& args);

}  // namespace copygen::cli
