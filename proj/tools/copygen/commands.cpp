// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "commands.hpp"

#include <pthread.h>
#include <signal.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "copygen/corpus/pretrain.hpp"
#include "copygen/corpus/record.hpp"
#include "copygen/corpus/vocab.hpp"
#include "copygen/decode/beam.hpp"
#include "copygen/decode/predictor.hpp"
#include "copygen/error.hpp"
#include "copygen/model/checkpoint.hpp"
#include "copygen/model/trainer.hpp"
#include "copygen/quality/grammar.hpp"
#include "copygen/quality/report.hpp"
#include "copygen/service/bench.hpp"
#include "copygen/service/http_api.hpp"
#include "copygen/service/model_registry.hpp"

namespace copygen::cli {

using nlohmann::json;

DataLayout data_layout_from_env() {
  const char* dir = std::getenv("COPYGEN_DATA_DIR");
  return {dir && *dir ? std::filesystem::path(dir) : std::filesystem::path("copygen-data")};
}

std::pair<std::string, int> listen_address_from_env() {
  const char* env = std::getenv("COPYGEN_LISTEN");
  const std::string value = env && *env ? env : "127.0.0.1:8080";
  const auto colon = value.rfind(':');
  if (colon == std::string::npos) throw Error("config_error", "COPYGEN_LISTEN must be host:port, got " + value);
  try {
    return {value.substr(0, colon), std::stoi(value.substr(colon + 1))};
  } catch (const std::exception&) {
    throw Error("config_error", "bad port in COPYGEN_LISTEN: " + value);
  }
}

namespace {

void log(const std::string& line) { std::cerr << line << '\n'; }

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("io_error", "cannot read " + path.string());
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!corpus::normalize_whitespace(line).empty()) out.push_back(line);
  return out;
}

model::ModelConfig make_config(const ModelArgs& m, std::size_t vocab_size) {
  model::ModelConfig c;
  c.vocab_size = vocab_size;
  c.d_model = m.d_model;
  c.heads = m.heads;
  c.encoder_layers = m.encoder_layers;
  c.decoder_layers = m.decoder_layers;
  c.ff_width = m.ff_width;
  c.max_positions = m.max_positions;
  c.dropout = m.dropout;
  c.pointer = !m.no_pointer;
  c.validate();
  return c;
}

model::TrainHyper make_hyper(const TrainArgs& t) {
  model::TrainHyper h;
  h.epochs = t.epochs;
  h.batch_size = t.batch_size;
  h.adam.learning_rate = t.learning_rate;
  h.clip_norm = t.clip_norm;
  h.pointer_in_pretraining = !t.pointer_off_in_pretraining;
  return h;
}

void print_epoch(std::size_t epoch, double loss) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "epoch %zu loss %.5f", epoch + 1, loss);
  log(buf);
}

// Pairs that fit the positional table; the rest are counted and skipped.
struct PairSet {
  std::vector<model::TrainExample> examples;
  std::size_t skipped = 0;
};

void add_pair(PairSet& set, const corpus::Vocab& vocab, const std::vector<std::string>& source,
              const std::vector<std::string>& target, std::size_t max_positions) {
  if (source.empty() || target.empty() || source.size() > max_positions || target.size() + 1 > max_positions) {
    ++set.skipped;
    return;
  }
  set.examples.push_back(model::make_example(vocab, source, target));
}

PairSet record_pairs(const std::vector<corpus::ProductRecord>& records, const corpus::Vocab& vocab,
                     corpus::TokenizeMode mode, std::size_t max_positions) {
  PairSet set;
  corpus::LinearizeConfig lin;
  lin.mode = mode;
  for (const auto& r : records) {
    if (!r.description) {
      ++set.skipped;
      continue;
    }
    add_pair(set, vocab, corpus::linearize_product(r, lin), corpus::tokenize(*r.description, mode), max_positions);
  }
  return set;
}

corpus::Vocab vocab_from_records(const std::vector<corpus::ProductRecord>& records, corpus::TokenizeMode mode) {
  std::vector<std::vector<std::string>> texts;
  corpus::LinearizeConfig lin;
  lin.mode = mode;
  for (const auto& r : records) {
    texts.push_back(corpus::linearize_product(r, lin));
    if (r.description) texts.push_back(corpus::tokenize(*r.description, mode));
  }
  return corpus::Vocab::build(texts, 1, 1'000'000);
}

model::TrainResult finetune_params(model::ModelParams initial, const PairSet& pairs, const TrainArgs& t) {
  if (pairs.examples.empty()) throw Error("empty_dataset", "no usable training pairs");
  log("training on " + std::to_string(pairs.examples.size()) + " pairs (" + std::to_string(pairs.skipped) +
      " skipped)");
  return model::train(std::move(initial), pairs.examples, corpus::Objective::finetune, make_hyper(t), t.seed,
                      print_epoch);
}

struct ServiceParts {
  DataLayout layout;
  service::Catalog catalog;
  service::ModelHandle handle;
  std::optional<service::ModelRegistry> registry;
  std::unique_ptr<service::DescriptionStore> store;
  std::unique_ptr<service::ScreeningBoard> board;
  std::unique_ptr<service::EventLog> events;
  std::unique_ptr<service::GenerationService> service;
};

std::unique_ptr<ServiceParts> open_service(const ServiceArgs& args, const std::filesystem::path& state_root) {
  auto p = std::make_unique<ServiceParts>();
  p->layout = data_layout_from_env();
  const auto catalog_path = args.catalog.value_or(p->layout.catalog());
  if (std::filesystem::exists(catalog_path))
    for (const auto& r : corpus::read_records(catalog_path)) p->catalog.upsert(r);
  else if (args.catalog)
    throw Error("io_error", "catalog not found: " + catalog_path.string());
  if (args.model) {
    p->handle.install(std::make_shared<const model::LoadedModel>(model::load_model(*args.model)));
  } else {
    p->registry.emplace(p->layout.models());
    p->registry->refresh(p->handle);
  }

  service::ServiceOptions options;
  options.beam.beam_size = args.beam_size;
  options.beam.max_len = args.max_len;
  options.beam.length_alpha = args.length_alpha;
  options.beam.no_repeat_trigram = args.no_repeat_trigram;
  options.linearize.mode = corpus::parse_tokenize_mode(args.mode);
  options.max_len_limit = std::max<std::size_t>(options.max_len_limit, args.max_len);
  options.max_beam_size = std::max<std::size_t>(options.max_beam_size, args.beam_size);
  if (std::filesystem::is_directory(p->layout.lexicon()))
    options.lexicon = quality::TermLexicon::load_directory(p->layout.lexicon());
  if (std::filesystem::exists(p->layout.grammar())) options.grammar = quality::load_ensemble(p->layout.grammar());
  options.grammar_threshold = args.grammar_threshold;
  options.require_lexicon = args.require_lexicon;

  p->store = std::make_unique<service::DescriptionStore>(state_root / "store");
  p->board = std::make_unique<service::ScreeningBoard>(*p->store, service::system_clock(), state_root / "audit.journal");
  p->events = std::make_unique<service::EventLog>(state_root / "events.journal");
  p->service = std::make_unique<service::GenerationService>(p->catalog, p->handle, *p->store, *p->board, *p->events,
                                                            std::move(options));
  return p;
}

void print_json(const json& value) {
  std::cout << value.dump(2, ' ', false, json::error_handler_t::replace) << std::endl;
}

}  // namespace

int run_clean(const CleanArgs& args) {
  corpus::CleaningRules rules;
  rules.min_description_chars = args.min_chars;
  rules.max_description_chars = args.max_chars;
  rules.forbidden_terms = args.forbidden;
  rules.require_description = !args.keep_unlabelled;
  const auto records = corpus::read_records(args.input);
  const auto [kept, report] = corpus::clean_corpus(records, rules);
  corpus::write_records(args.output, kept);
  json reasons = json::object();
  for (const auto& [reason, n] : report.rejected_by_reason) reasons[reason] = n;
  print_json({{"input", report.input_count}, {"kept", report.kept_count}, {"rejected", reasons}});
  return 0;
}

int run_build(const BuildArgs& args) {
  const auto mode = corpus::parse_tokenize_mode(args.mode);
  const auto records = corpus::read_records(args.records);
  std::vector<std::string> texts;
  if (args.documents) {
    texts = read_lines(*args.documents);
  } else {
    for (const auto& r : records)
      if (r.description) texts.push_back(*r.description);
  }
  const bool want_sr = args.objective == "sr" || args.objective == "mixed";
  const bool want_psg = args.objective == "psg" || args.objective == "mixed";
  if (!want_sr && !want_psg) throw Error("config_error", "objective must be sr, psg or mixed");

  std::vector<corpus::PretrainExample> examples;
  std::size_t too_short = 0;
  corpus::PsgConfig psg;
  psg.reverse = args.psg_reverse;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    corpus::Document doc;
    try {
      doc = corpus::split_sentences(texts[i], mode, "doc-" + std::to_string(i));
    } catch (const Error&) {
      ++too_short;
      continue;
    }
    if (doc.size() < 2) {
      ++too_short;
      continue;
    }
    if (want_sr) examples.push_back(corpus::make_sr_example(doc, args.seed + i));
    if (want_psg) examples.push_back(corpus::make_psg_example(doc, psg));
  }
  corpus::write_pretrain_examples(args.output, examples);

  std::vector<std::vector<std::string>> vocab_texts;
  corpus::LinearizeConfig lin;
  lin.mode = mode;
  for (const auto& r : records) {
    vocab_texts.push_back(corpus::linearize_product(r, lin));
    if (r.description) vocab_texts.push_back(corpus::tokenize(*r.description, mode));
  }
  for (const auto& e : examples) vocab_texts.push_back(e.input);
  const auto vocab = corpus::Vocab::build(vocab_texts, args.min_freq, args.max_vocab);
  const auto vocab_path = args.vocab_out.value_or(data_layout_from_env().vocab());
  if (vocab_path.has_parent_path()) std::filesystem::create_directories(vocab_path.parent_path());
  vocab.save(vocab_path);
  print_json({{"documents", texts.size()},
              {"skipped_documents", too_short},
              {"examples", examples.size()},
              {"vocab_size", vocab.size()},
              {"vocab", vocab_path.string()}});
  return 0;
}

int run_pretrain(const PretrainArgs& args) {
  if (args.objective != "sr" && args.objective != "psg" && args.objective != "mixed")
    throw Error("config_error", "objective must be sr, psg or mixed");
  std::optional<model::LoadedModel> init;
  if (args.init) init = model::load_model(*args.init);
  const auto vocab = init ? init->vocab : corpus::Vocab::load(args.vocab.value_or(data_layout_from_env().vocab()));
  auto params = init ? std::move(init->params)
                     : model::ModelParams::initialize(make_config(args.model, vocab.size()), args.train.seed);

  PairSet pairs;
  for (const auto& e : corpus::read_pretrain_examples(args.data)) {
    const auto tag = corpus::to_string(e.objective);
    if (args.objective != "mixed" && tag != args.objective) continue;
    add_pair(pairs, vocab, e.input, e.target, params.config().max_positions);
  }
  if (pairs.examples.empty()) throw Error("empty_dataset", "no pre-training pairs for objective " + args.objective);
  log("pre-training (" + args.objective + ") on " + std::to_string(pairs.examples.size()) + " pairs (" +
      std::to_string(pairs.skipped) + " skipped)");
  const auto objective =
      args.objective == "psg" ? corpus::Objective::pseudo_summary : corpus::Objective::sentence_reordering;
  auto result = model::train(std::move(params), pairs.examples, objective, make_hyper(args.train),
                             args.train.seed ^ 0x5bd1e995ULL, print_epoch);
  model::save_model(result.params, vocab, args.output);
  print_json({{"checkpoint", args.output.string()},
              {"version", model::checkpoint_version(args.output)},
              {"final_loss", result.epoch_losses.empty() ? json(nullptr) : json(result.epoch_losses.back())}});
  return 0;
}

int run_finetune(const FinetuneArgs& args) {
  const auto mode = corpus::parse_tokenize_mode(args.mode);
  const auto records = corpus::read_records(args.records);
  std::optional<model::LoadedModel> init;
  if (args.init) init = model::load_model(*args.init);
  const auto vocab = init ? init->vocab
                     : args.vocab ? corpus::Vocab::load(*args.vocab)
                                  : vocab_from_records(records, mode);
  auto params = init ? std::move(init->params)
                     : model::ModelParams::initialize(make_config(args.model, vocab.size()), args.train.seed);
  const auto pairs = record_pairs(records, vocab, mode, params.config().max_positions);
  auto result = finetune_params(std::move(params), pairs, args.train);
  std::string where, version;
  if (args.output) {
    model::save_model(result.params, vocab, *args.output);
    where = args.output->string();
    version = model::checkpoint_version(*args.output);
  } else {
    service::ModelRegistry registry(data_layout_from_env().models());
    version = registry.publish(result.params, vocab);
    where = (registry.dir() / (version + ".apcg")).string();
  }
  print_json({{"checkpoint", where}, {"version", version}, {"final_loss", result.epoch_losses.back()}});
  return 0;
}

int run_retrain(const RetrainArgs& args) {
  const auto mode = corpus::parse_tokenize_mode(args.mode);
  service::ModelRegistry registry(data_layout_from_env().models());
  const auto current = registry.load_current();
  corpus::CleaningRules rules;
  rules.min_description_chars = args.min_chars;
  rules.max_description_chars = args.max_chars;
  const auto [kept, report] = corpus::clean_corpus(corpus::read_records(args.records), rules);
  log("cleaning kept " + std::to_string(report.kept_count) + " of " + std::to_string(report.input_count));
  const auto pairs = record_pairs(kept, current->vocab, mode, current->params.config().max_positions);
  auto result = finetune_params(current->params, pairs, args.train);
  const auto version = registry.publish(result.params, current->vocab);
  print_json({{"previous_version", current->version},
              {"version", version},
              {"final_loss", result.epoch_losses.back()},
              {"kept_records", report.kept_count}});
  return 0;
}

int run_generate(const GenerateArgs& args) {
  const auto layout = data_layout_from_env();
  auto parts = open_service(args.service, layout.root);
  service::GenerateRequest request;
  request.sku = args.sku;
  if (args.record_json) request.record = corpus::record_from_json_line(*args.record_json);
  const auto artifact = parts->service->generate(request);
  std::cout << service::to_json(artifact) << std::endl;
  return 0;
}

int run_batch(const BatchArgs& args) {
  const auto layout = data_layout_from_env();
  auto parts = open_service(args.service, layout.root);
  const auto skus = args.all ? parts->catalog.skus() : args.skus;
  const auto s = parts->service->batch_generate(skus);
  json errors = json::array();
  for (const auto& [sku, code] : s.errors) errors.push_back({{"sku", sku}, {"error", code}});
  print_json({{"requested", s.requested},
              {"cached", s.cached},
              {"rejected", s.rejected},
              {"enqueued", s.enqueued},
              {"errored", s.errored},
              {"errors", errors}});
  return 0;
}

int run_eval(const EvalArgs& args) {
  const auto mode = corpus::parse_tokenize_mode(args.mode);
  std::vector<corpus::ProductRecord> records;
  for (auto& r : corpus::read_records(args.records))
    if (r.description) records.push_back(std::move(r));
  if (records.empty()) throw Error("empty_dataset", "no records with a reference description");

  std::vector<std::string> ref_texts;
  std::vector<quality::Tokens> ref_tokens;
  for (const auto& r : records) {
    ref_texts.push_back(*r.description);
    ref_tokens.push_back(corpus::tokenize(*r.description, mode));
  }
  decode::BeamConfig beam;
  beam.beam_size = args.beam_size;
  beam.max_len = args.max_len;
  beam.length_alpha = args.length_alpha;
  corpus::LinearizeConfig lin;
  lin.mode = mode;

  std::vector<quality::MetricRow> rows;
  for (const auto& entry : args.models) {
    const auto eq = entry.find('=');
    const std::filesystem::path path = eq == std::string::npos ? entry : entry.substr(eq + 1);
    const std::string name = eq == std::string::npos ? path.stem().string() : entry.substr(0, eq);
    auto model = std::make_shared<const model::LoadedModel>(model::load_model(path));
    decode::ModelPredictor predictor(model);
    std::vector<std::string> texts;
    std::vector<quality::Tokens> tokens;
    std::size_t failed = 0;
    for (const auto& r : records) {
      std::string text;
      try {
        const auto encoded = predictor.encoder_predictor(corpus::linearize_product(r, lin));
        const auto hyps = decode::beam_search(predictor, encoded, beam);
        if (!hyps.empty()) text = corpus::detokenize(decode::surface_tokens(model->vocab, encoded.source, hyps[0]), mode);
      } catch (const Error&) {
        ++failed;
      }
      tokens.push_back(corpus::tokenize(text, mode));
      texts.push_back(std::move(text));
    }
    if (failed) log(name + ": " + std::to_string(failed) + " inputs could not be decoded and score as empty");
    rows.push_back(quality::evaluate_corpus(name, texts, tokens, ref_texts, ref_tokens));
  }
  std::cout << quality::format_table(rows, args.delimiter);
  return 0;
}

int run_serve(const ServeArgs& args) {
  const auto layout = data_layout_from_env();
  const auto [host, port] = listen_address_from_env();

  // Signals are taken by a dedicated thread so shutdown runs outside a handler.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  auto parts = open_service(args.service, layout.root);
  service::HttpServer server(*parts->service);
  const int bound = server.bind(host, port);
  log("listening on " + host + ":" + std::to_string(bound) + ", model " +
      (parts->handle.version().empty() ? std::string("<none>") : parts->handle.version()));

  std::mutex mu;
  std::condition_variable cv;
  bool stopping = false;
  std::thread poller;
  if (parts->registry) {
    poller = std::thread([&] {
      std::unique_lock lock(mu);
      const auto period = std::chrono::duration<double>(args.poll_seconds);
      while (!cv.wait_for(lock, period, [&] { return stopping; })) {
        try {
          if (parts->registry->refresh(parts->handle)) log("installed model " + parts->handle.version());
        } catch (const std::exception& e) {
          log(std::string("model refresh failed: ") + e.what());
        }
      }
    });
  }
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    log("shutting down");
    server.stop();
  });
  server.serve();
  {
    std::lock_guard lock(mu);
    stopping = true;
  }
  cv.notify_all();
  if (poller.joinable()) poller.join();
  // serve() can also return on its own (bind loss); wake the waiter then.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

int run_bench(const BenchArgs& args) {
  service::BenchReport report;
  if (args.inject) {
    std::vector<double> latencies;
    double total = 0.0;
    for (const auto& line : read_lines(*args.inject)) {
      latencies.push_back(std::stod(line));
      total += latencies.back();
    }
    report = service::make_report(std::move(latencies), total / 1000.0 / static_cast<double>(std::max<std::size_t>(1, args.concurrency)), 0);
  } else {
    const auto layout = data_layout_from_env();
    const auto scratch = layout.root / "bench-scratch";
    std::filesystem::remove_all(scratch);
    auto parts = open_service(args.service, scratch);
    const auto skus = parts->catalog.skus();
    if (skus.empty()) throw Error("empty_workload", "bench needs a nonempty catalog");
    if (args.cached) {
      for (const auto& sku : skus) {
        service::GenerateRequest r;
        r.sku = sku;
        auto a = parts->service->generate(r);
        a.state = service::ScreeningState::approved;
        parts->store->put(a);
      }
    }
    std::vector<corpus::ProductRecord> inline_records;
    for (const auto& sku : skus) {
      auto r = *parts->catalog.find(sku);
      r.sku.clear();  // no sku, no cache lookup
      inline_records.push_back(std::move(r));
    }
    report = service::run_bench(
        [&](std::size_t i) {
          service::GenerateRequest r;
          if (args.cached)
            r.sku = skus[i % skus.size()];
          else
            r.record = inline_records[i % inline_records.size()];
          parts->service->generate(r);
        },
        args.requests, args.concurrency);
    parts.reset();
    std::filesystem::remove_all(scratch);
  }
  print_json({{"requests", report.requests},
              {"errors", report.errors},
              {"concurrency", args.concurrency},
              {"qps", report.qps},
              {"average_ms", report.average_ms},
              {"tp99_ms", report.tp99_ms},
              {"max_ms", report.max_ms}});
  return 0;
}

int run_grammar_train(const GrammarArgs& args) {
  std::vector<quality::FeatureVector> x;
  std::vector<int> y;
  for (const auto& t : read_lines(args.good)) {
    x.push_back(quality::grammar_features(t));
    y.push_back(1);
  }
  for (const auto& t : read_lines(args.bad)) {
    x.push_back(quality::grammar_features(t));
    y.push_back(-1);
  }
  const auto ensemble = quality::adaboost_train(x, y, args.rounds);
  const auto out = args.output.value_or(data_layout_from_env().grammar());
  if (out.has_parent_path()) std::filesystem::create_directories(out.parent_path());
  quality::save_ensemble(ensemble, out);
  print_json({{"stumps", ensemble.stumps.size()},
              {"training_error", ensemble.training_errors.empty() ? json(nullptr) : json(ensemble.training_errors.back())},
              {"error_bound", ensemble.error_bound()},
              {"output", out.string()}});
  return 0;
}

}  // namespace copygen::cli
