// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include "copygen/service/generation.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include "copygen/corpus/tokenizer.hpp"
#include "copygen/decode/predictor.hpp"
#include "copygen/error.hpp"
#include "copygen/quality/grammar.hpp"

namespace copygen::service {

GenerationService::GenerationService(Catalog& catalog, ModelHandle& model, DescriptionStore& store,
                                     ScreeningBoard& board, EventLog& events, ServiceOptions options, Clock clock)
    : catalog_(catalog),
      model_(model),
      store_(store),
      board_(board),
      events_(events),
      options_(std::move(options)),
      clock_(std::move(clock)) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "a%llx-", static_cast<unsigned long long>(clock_()));
  id_prefix_ = buf;
}

std::string GenerationService::next_id() { return id_prefix_ + std::to_string(++id_counter_); }

corpus::ProductRecord GenerationService::resolve(const GenerateRequest& request) const {
  if (request.record) return *request.record;
  if (request.sku) {
    if (auto r = catalog_.find(*request.sku)) return *r;
    throw Error("unknown_product", "no product with sku " + *request.sku);
  }
  throw Error("unknown_product", "request has neither a sku nor a record");
}

GenerationArtifact GenerationService::generate(const GenerateRequest& request) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto elapsed_ms = [&] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  };
  ++requests_;
  const auto record = resolve(request);
  // Pin one model for the whole request so a concurrent swap cannot mix versions.
  const auto model = model_.current();
  if (!model) throw Error("model_unavailable", "no model is loaded");

  if (!record.sku.empty())
    if (auto cached = store_.get(record.sku, model->version)) {
      ++cache_hits_;
      cached->provenance = Provenance::cache;
      cached->latency_ms = elapsed_ms();
      return *cached;
    }

  decode::BeamConfig beam = options_.beam;
  if (request.beam_size) beam.beam_size = *request.beam_size;
  if (request.max_len) beam.max_len = *request.max_len;
  if (beam.beam_size == 0 || beam.beam_size > options_.max_beam_size)
    throw Error("config_error", "beam_size must be in [1, " + std::to_string(options_.max_beam_size) + "]");
  if (beam.max_len == 0 || beam.max_len > options_.max_len_limit)
    throw Error("config_error", "max_len must be in [1, " + std::to_string(options_.max_len_limit) + "]");

  const auto tokens = corpus::linearize_product(record, options_.linearize);
  decode::ModelPredictor predictor(model);
  const auto encoded = predictor.encoder_predictor(tokens);
  ++model_invocations_;
  const auto hyps = decode::beam_search(predictor, encoded, beam);

  GenerationArtifact a;
  a.id = next_id();
  a.sku = record.sku;
  a.provenance = Provenance::model;
  a.model_version = model->version;
  a.created_ms = clock_();
  for (const auto& h : hyps) {
    const auto words = decode::surface_tokens(model->vocab, encoded.source, h);
    a.candidates.push_back({corpus::detokenize(words, options_.linearize.mode), h.score, h.log_prob});
  }
  if (!a.candidates.empty()) a.text = a.candidates.front().text;

  a.verdict = quality::check_terms_numbers(a.text, record, options_.lexicon);
  if (!options_.require_lexicon) {
    auto& reasons = a.verdict.reasons;
    reasons.erase(std::remove_if(reasons.begin(), reasons.end(), [](const auto& r) { return r.rule == "no_lexicon"; }),
                  reasons.end());
    a.verdict.accepted = reasons.empty();
  }
  if (!options_.grammar.stumps.empty())
    a.verdict.merge(quality::grammar_filter(a.text, options_.grammar, options_.grammar_threshold, nullptr,
                                            options_.linearize.mode));
  a.latency_ms = elapsed_ms();
  board_.add(a);
  if (options_.auto_submit && a.verdict.accepted) board_.submit(a.id);
  return a;
}

BatchSummary GenerationService::batch_generate(const std::vector<std::string>& skus) {
  if (skus.empty()) throw Error("empty_workload", "batch needs at least one sku");
  BatchSummary s;
  s.requested = skus.size();
  for (const auto& sku : skus) {
    try {
      GenerateRequest request;
      request.sku = sku;
      const auto a = generate(request);
      s.artifact_ids.push_back(a.id);
      if (a.provenance == Provenance::cache) {
        ++s.cached;
      } else if (!a.verdict.accepted) {
        ++s.rejected;
      } else {
        board_.submit(a.id);
        ++s.enqueued;
      }
    } catch (const Error& e) {
      ++s.errored;
      s.errors.emplace_back(sku, e.code());
    }
  }
  return s;
}

std::optional<GenerationArtifact> GenerationService::approved_description(const std::string& sku) const {
  const auto model = model_.current();
  if (!model) throw Error("model_unavailable", "no model is loaded");
  return store_.get(sku, model->version);
}

ServiceStats GenerationService::stats() const {
  ServiceStats s;
  s.requests = requests_.load();
  s.cache_hits = cache_hits_.load();
  s.model_invocations = model_invocations_.load();
  s.acceptance_rate_today = board_.acceptance_rate_today();
  const auto f = events_.funnel();
  if (f.pv > 0) s.ctr = ctr(f);
  if (f.clicks > 0) s.cvr = cvr(f);
  return s;
}

}  // namespace copygen::service
