// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "copygen/error.hpp"

namespace {

using namespace copygen::cli;

void add_model_options(CLI::App* app, ModelArgs& m) {
  app->add_option("--d-model", m.d_model, "Hidden width")->capture_default_str();
  app->add_option("--heads", m.heads, "Attention heads")->capture_default_str();
  app->add_option("--encoder-layers", m.encoder_layers)->capture_default_str();
  app->add_option("--decoder-layers", m.decoder_layers)->capture_default_str();
  app->add_option("--ff-width", m.ff_width, "Feed-forward width")->capture_default_str();
  app->add_option("--max-positions", m.max_positions, "Longest input or output sequence")->capture_default_str();
  app->add_option("--dropout", m.dropout)->capture_default_str();
  app->add_flag("--no-pointer", m.no_pointer, "Plain softmax output without the copy head");
}

void add_train_options(CLI::App* app, TrainArgs& t) {
  app->add_option("--epochs", t.epochs)->capture_default_str();
  app->add_option("--batch-size", t.batch_size)->capture_default_str();
  app->add_option("--lr", t.learning_rate, "Adam learning rate")->capture_default_str();
  app->add_option("--clip-norm", t.clip_norm, "Global gradient-norm clip, 0 disables")->capture_default_str();
  app->add_option("--seed", t.seed)->capture_default_str();
}

void add_service_options(CLI::App* app, ServiceArgs& s) {
  app->add_option("--model", s.model, "Checkpoint file; default is the registry's current model");
  app->add_option("--catalog", s.catalog, "Product records (JSON lines); default <data>/catalog.jsonl");
  app->add_option("--beam-size", s.beam_size)->capture_default_str();
  app->add_option("--max-len", s.max_len)->capture_default_str();
  app->add_option("--length-alpha", s.length_alpha)->capture_default_str();
  app->add_flag("--no-repeat-trigram", s.no_repeat_trigram);
  app->add_option("--grammar-threshold", s.grammar_threshold)->capture_default_str();
  app->add_flag("--require-lexicon", s.require_lexicon, "Reject products whose category has no lexicon");
  app->add_option("--mode", s.mode, "whitespace or character tokenization")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"copygen: product description generation with a copy-augmented transformer"};
  app.require_subcommand(1);
  app.footer("Environment: COPYGEN_DATA_DIR (data directory), COPYGEN_LISTEN (host:port for serve).");

  auto* corpus = app.add_subcommand("corpus", "Prepare training data");
  corpus->require_subcommand(1);
  CleanArgs clean;
  auto* clean_cmd = corpus->add_subcommand("clean", "Apply cleaning rules to product records");
  clean_cmd->add_option("--in", clean.input)->required()->check(CLI::ExistingFile);
  clean_cmd->add_option("--out", clean.output)->required();
  clean_cmd->add_option("--min-chars", clean.min_chars)->capture_default_str();
  clean_cmd->add_option("--max-chars", clean.max_chars)->capture_default_str();
  clean_cmd->add_option("--forbid", clean.forbidden, "Forbidden term (repeatable)");
  clean_cmd->add_flag("--keep-unlabelled", clean.keep_unlabelled, "Keep records without a description");

  BuildArgs build;
  auto* build_cmd = corpus->add_subcommand("build", "Build the vocabulary and pre-training examples");
  build_cmd->add_option("--records", build.records)->required()->check(CLI::ExistingFile);
  build_cmd->add_option("--documents", build.documents, "One unlabeled document per line")->check(CLI::ExistingFile);
  build_cmd->add_option("--out", build.output, "Pre-training examples (JSON lines)")->required();
  build_cmd->add_option("--vocab-out", build.vocab_out, "Default <data>/vocab.txt");
  build_cmd->add_option("--objective", build.objective)->check(CLI::IsMember({"sr", "psg", "mixed"}))->capture_default_str();
  build_cmd->add_option("--min-freq", build.min_freq)->capture_default_str();
  build_cmd->add_option("--max-vocab", build.max_vocab)->capture_default_str();
  build_cmd->add_option("--seed", build.seed)->capture_default_str();
  build_cmd->add_option("--mode", build.mode)->capture_default_str();
  build_cmd->add_flag("--psg-reverse", build.psg_reverse, "Generate the selected sentences from the rest");

  PretrainArgs pretrain;
  auto* pretrain_cmd = app.add_subcommand("pretrain", "Pre-train on reordering and pseudo-summary examples");
  pretrain_cmd->add_option("--objective", pretrain.objective)
      ->check(CLI::IsMember({"sr", "psg", "mixed"}))
      ->capture_default_str();
  pretrain_cmd->add_option("--data", pretrain.data)->required()->check(CLI::ExistingFile);
  pretrain_cmd->add_option("--vocab", pretrain.vocab, "Default <data>/vocab.txt");
  pretrain_cmd->add_option("--init", pretrain.init, "Continue from this checkpoint");
  pretrain_cmd->add_option("--out", pretrain.output)->required();
  pretrain_cmd->add_flag("--no-pointer-in-pretraining", pretrain.train.pointer_off_in_pretraining);
  add_model_options(pretrain_cmd, pretrain.model);
  add_train_options(pretrain_cmd, pretrain.train);

  FinetuneArgs finetune;
  auto* finetune_cmd = app.add_subcommand("finetune", "Train on record/description pairs");
  finetune_cmd->add_option("--records", finetune.records)->required()->check(CLI::ExistingFile);
  finetune_cmd->add_option("--init", finetune.init, "Start from this checkpoint (uses its vocabulary)");
  finetune_cmd->add_option("--vocab", finetune.vocab, "Vocabulary when starting fresh; default built from records");
  finetune_cmd->add_option("--out", finetune.output, "Checkpoint path; default publishes to the model registry");
  finetune_cmd->add_option("--mode", finetune.mode)->capture_default_str();
  add_model_options(finetune_cmd, finetune.model);
  add_train_options(finetune_cmd, finetune.train);

  GenerateArgs generate;
  auto* generate_cmd = app.add_subcommand("generate", "Generate a description for one product");
  auto* sku_opt = generate_cmd->add_option("--sku", generate.sku);
  auto* record_opt = generate_cmd->add_option("--record-json", generate.record_json, "Inline product record");
  sku_opt->excludes(record_opt);
  add_service_options(generate_cmd, generate.service);

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch-generate", "Generate, filter and enqueue a list of products");
  batch_cmd->add_option("--sku", batch.skus, "Product sku (repeatable)");
  batch_cmd->add_flag("--all", batch.all, "Every product in the catalog");
  add_service_options(batch_cmd, batch.service);

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Score models against reference descriptions");
  eval_cmd->add_option("--records", eval.records)->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--model", eval.models, "name=checkpoint or checkpoint (repeatable)")->required();
  eval_cmd->add_option("--beam-size", eval.beam_size)->capture_default_str();
  eval_cmd->add_option("--max-len", eval.max_len)->capture_default_str();
  eval_cmd->add_option("--length-alpha", eval.length_alpha)->capture_default_str();
  eval_cmd->add_option("--mode", eval.mode)->capture_default_str();
  std::string delimiter = "tab";
  eval_cmd->add_option("--delimiter", delimiter, "tab, comma or a single character")->capture_default_str();

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  serve_cmd->add_option("--poll-seconds", serve.poll_seconds, "Registry check interval")->capture_default_str();
  add_service_options(serve_cmd, serve.service);

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Measure generation latency and throughput");
  bench_cmd->add_option("--requests", bench.requests)->capture_default_str();
  bench_cmd->add_option("--concurrency", bench.concurrency)->capture_default_str();
  bench_cmd->add_flag("--cached", bench.cached, "Measure the cache-hit path");
  bench_cmd->add_option("--inject", bench.inject, "Report on recorded latencies (ms, one per line)")
      ->check(CLI::ExistingFile);
  add_service_options(bench_cmd, bench.service);

  GrammarArgs grammar;
  auto* grammar_cmd = app.add_subcommand("grammar-train", "Fit the grammar screening ensemble");
  grammar_cmd->add_option("--good", grammar.good, "Fluent texts, one per line")->required()->check(CLI::ExistingFile);
  grammar_cmd->add_option("--bad", grammar.bad, "Degenerate texts, one per line")->required()->check(CLI::ExistingFile);
  grammar_cmd->add_option("--rounds", grammar.rounds)->capture_default_str();
  grammar_cmd->add_option("--out", grammar.output, "Default <data>/grammar.txt");

  RetrainArgs retrain;
  auto* retrain_cmd = app.add_subcommand("retrain", "Clean, fine-tune the current model and publish it");
  retrain_cmd->add_option("--records", retrain.records)->required()->check(CLI::ExistingFile);
  retrain_cmd->add_option("--min-chars", retrain.min_chars)->capture_default_str();
  retrain_cmd->add_option("--max-chars", retrain.max_chars)->capture_default_str();
  retrain_cmd->add_option("--mode", retrain.mode)->capture_default_str();
  add_train_options(retrain_cmd, retrain.train);

  CLI11_PARSE(app, argc, argv);

  try {
    if (clean_cmd->parsed()) return run_clean(clean);
    if (build_cmd->parsed()) return run_build(build);
    if (pretrain_cmd->parsed()) return run_pretrain(pretrain);
    if (finetune_cmd->parsed()) return run_finetune(finetune);
    if (generate_cmd->parsed()) {
      if (!generate.sku && !generate.record_json) throw copygen::Error("config_error", "give --sku or --record-json");
      return run_generate(generate);
    }
    if (batch_cmd->parsed()) {
      if (batch.skus.empty() && !batch.all) throw copygen::Error("config_error", "give --sku or --all");
      return run_batch(batch);
    }
    if (eval_cmd->parsed()) {
      if (delimiter == "tab") eval.delimiter = '\t';
      else if (delimiter == "comma") eval.delimiter = ',';
      else if (delimiter.size() == 1) eval.delimiter = delimiter[0];
      else throw copygen::Error("config_error", "delimiter must be tab, comma or one character");
      return run_eval(eval);
    }
    if (serve_cmd->parsed()) return run_serve(serve);
    if (bench_cmd->parsed()) return run_bench(bench);
    if (grammar_cmd->parsed()) return run_grammar_train(grammar);
    if (retrain_cmd->parsed()) return run_retrain(retrain);
  } catch (const copygen::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
