// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "check.hpp"
#include "copygen/corpus/record.hpp"
#include "copygen/decode/beam.hpp"
#include "copygen/model/checkpoint.hpp"
#include "support/model_gradcheck.hpp"
#include "support/toy.hpp"

namespace copygen::acceptance {

using corpus::kBos;
using corpus::TokenId;

void gradient_suite(Check& c) {
  const auto vocab = testing::toy_vocab(41);
  const auto config = testing::toy_config(vocab.size(), 16, 2);
  c.expect(config.encoder_layers == 1 && config.decoder_layers == 1 && config.pointer, "toy config shape");
  c.note("V=" + std::to_string(vocab.size()));
  const auto params = model::ModelParams::initialize(config, 11);
  // The second pair targets an out-of-vocabulary source word, so the copy
  // path carries gradient as well.
  const std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>> pairs = {
      {{"w1", "w2", "w7", "w3"}, {"w3", "w9", "w1"}},
      {{"w4", "qq", "w5", "zz", "w4"}, {"zz", "w5", "qq", "w0"}},
  };
  double worst = 0.0;
  std::size_t coords = 0;
  for (const auto& [src, tgt] : pairs) {
    const auto ex = model::make_example(vocab, src, tgt);
    const auto r = testing::model_gradient_check(params, ex, std::numeric_limits<std::size_t>::max());
    worst = std::max(worst, r.max_relative_error);
    coords += r.checked;
    c.expect(r.checked == params.parameter_count(), "not every coordinate was checked");
    c.expect(r.max_relative_error < 1e-4, "max relative error " + fmt(r.max_relative_error));
  }
  c.note("coords=" + std::to_string(coords) + " max_rel=" + fmt(worst, 3));
}

void pointer_mixture(Check& c) {
  const auto vocab = testing::toy_vocab(41);
  const auto params = model::ModelParams::initialize(testing::toy_config(vocab.size()), 5);
  const std::size_t v = vocab.size();
  numerics::Rng rng(17);
  model::SourceIds source;
  numerics::Tensor states;
  double worst_sum = 0.0;
  for (int step = 0; step < 1000; ++step) {
    if (step % 25 == 0) {
      const auto words = testing::random_words(rng, 55, 2, 12);  // w41..w54 are out of vocabulary
      source = model::extend_source(vocab, words);
      states = model::encode(params, source.base);
    }
    std::vector<TokenId> prefix = {kBos};
    for (std::size_t i = 0, n = rng.below(8); i < n; ++i)
      prefix.push_back(
          static_cast<TokenId>(corpus::kNumSpecials + rng.below(source.extended_size() - corpus::kNumSpecials)));
    const auto out = model::decode_step(params, prefix, states, source);
    const auto& mixed = out.mixed_dist.data();
    const double sum = std::accumulate(mixed.begin(), mixed.end(), 0.0);
    worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    c.expect(std::abs(sum - 1.0) <= 1e-6, "step " + std::to_string(step) + " sums to " + fmt(sum, 17));
    c.expect(out.p_gen >= 0.0 && out.p_gen <= 1.0, "p_gen out of range");

    const auto gen = model::mixed_distribution(out.vocab_dist, out.copy_dist, 1.0, source.extended,
                                               source.extended_size());
    bool same = gen.size() == source.extended_size();
    for (std::size_t w = 0; same && w < gen.size(); ++w) same = gen[w] == (w < v ? out.vocab_dist[w] : 0.0);
    c.expect(same, "p_gen=1 differs from the vocabulary distribution at step " + std::to_string(step));

    const auto copy = model::mixed_distribution(out.vocab_dist, out.copy_dist, 0.0, source.extended,
                                                source.extended_size());
    const std::set<TokenId> in_source(source.extended.begin(), source.extended.end());
    bool confined = true;
    for (std::size_t w = 0; w < copy.size(); ++w)
      if (copy[w] != 0.0 && !in_source.count(static_cast<TokenId>(w))) confined = false;
    c.expect(confined, "p_gen=0 puts mass outside the source at step " + std::to_string(step));
  }
  c.note("steps=1000 max|sum-1|=" + fmt(worst_sum, 3));
}

namespace {

corpus::ProductRecord overfit_record(std::size_t i) {
  static const char* kinds[] = {"phone", "tablet", "watch", "speaker", "camera", "router", "lamp", "kettle"};
  static const char* colors[] = {"black", "silver", "blue", "red", "white", "green"};
  corpus::ProductRecord r;
  r.sku = "ovf-" + std::to_string(i);
  const std::string kind = kinds[i % 8], color = colors[(i / 2) % 6];
  r.title = color + " " + kind + " m" + std::to_string(i);
  r.attributes = {{"battery", std::to_string(2000 + 100 * i) + "mAh"},
                  {"color", color},
                  {"weight", std::to_string(120 + 7 * i) + "g"}};
  r.category = "electronics";
  r.description = "a " + color + " " + kind + " with " + r.attributes[0].value + " battery , weighing " +
                  r.attributes[2].value + " .";
  return r;
}

struct OverfitRun {
  model::ModelParams params;
  std::vector<std::vector<std::string>> outputs;
  std::size_t exact = 0;
};

OverfitRun overfit_once(const std::vector<corpus::ProductRecord>& records, const corpus::Vocab& vocab,
                        std::uint64_t seed) {
  std::vector<model::TrainExample> data;
  for (const auto& r : records)
    data.push_back(model::make_example(vocab, corpus::linearize_product(r),
                                       corpus::tokenize(*r.description, corpus::TokenizeMode::whitespace)));
  model::TrainHyper hyper;
  hyper.epochs = 120;
  hyper.batch_size = 4;
  hyper.adam.learning_rate = 3e-3;
  auto result = model::train(testing::toy_config(vocab.size(), 32, 2), data, corpus::Objective::finetune, hyper, seed);
  OverfitRun run{result.params, {}, 0};
  auto lm = std::make_shared<const model::LoadedModel>(model::LoadedModel{std::move(result.params), vocab, "ovf"});
  decode::ModelPredictor predictor(lm);
  for (const auto& r : records) {
    const auto encoded = predictor.encoder_predictor(corpus::linearize_product(r));
    const auto hyp = decode::greedy_decode(predictor, encoded, 32);
    run.outputs.push_back(decode::surface_tokens(vocab, encoded.source, hyp));
    run.exact += hyp.finished && run.outputs.back() == corpus::tokenize(*r.description, corpus::TokenizeMode::whitespace);
  }
  return run;
}

}  // namespace

void overfit_harness(Check& c) {
  std::vector<corpus::ProductRecord> records;
  std::vector<std::vector<std::string>> all;
  for (std::size_t i = 0; i < 32; ++i) {
    records.push_back(overfit_record(i));
    all.push_back(corpus::linearize_product(records.back()));
    all.push_back(corpus::tokenize(*records.back().description, corpus::TokenizeMode::whitespace));
  }
  const auto vocab = corpus::Vocab::build(all, 1, 2000);
  const auto first = overfit_once(records, vocab, 7);
  const auto second = overfit_once(records, vocab, 7);
  c.expect(first.exact * 10 >= records.size() * 9,
           "greedy exact match " + std::to_string(first.exact) + "/" + std::to_string(records.size()));
  bool identical = first.params.tensors().size() == second.params.tensors().size();
  for (std::size_t k = 0; identical && k < first.params.tensors().size(); ++k)
    identical = std::ranges::equal(first.params.tensors()[k].data(), second.params.tensors()[k].data());
  c.expect(identical, "same seed produced different parameters");
  c.expect(first.outputs == second.outputs, "same seed produced different outputs");
  c.note("exact=" + std::to_string(first.exact) + "/32");
}

}  // namespace copygen::acceptance
