// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include <gtest/gtest.h>

#include "copygen/decode/beam.hpp"
#include "copygen/error.hpp"
#include "support/table_predictor.hpp"
#include "support/toy.hpp"

namespace copygen {
namespace {

using corpus::kBos;
using corpus::kEos;
using decode::BeamConfig;
using decode::Candidate;
using decode::Hypothesis;
using decode::TokenId;
using testing::Best;
using testing::TablePredictor;

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

class ToyDecoder : public ::testing::Test {
 protected:
  static constexpr std::size_t kWords = 30;
  corpus::Vocab vocab = testing::toy_vocab(kWords);
  std::shared_ptr<model::LoadedModel> lm = std::make_shared<model::LoadedModel>(
      model::LoadedModel{model::ModelParams::initialize(testing::toy_config(vocab.size()), 21), vocab, "v"});
  decode::ModelPredictor predictor{lm};

  std::vector<std::string> input(std::uint64_t seed, std::size_t min_len = 2, std::size_t max_len = 8) {
    numerics::Rng rng(seed);
    auto words = testing::random_words(rng, kWords + 5, min_len, max_len);  // some out of vocabulary
    return words;
  }
};

TEST(TopK, DescendingWithLowerIndexOnTies) {
  const std::vector<double> d = {0.1, 0.3, 0.2, 0.3, 0.1};
  const auto c = decode::top_k(d, 4);
  ASSERT_EQ(c.size(), 4u);
  EXPECT_EQ(c[0].index, 1u);
  EXPECT_EQ(c[1].index, 3u);
  EXPECT_EQ(c[2].index, 2u);
  EXPECT_EQ(c[3].index, 0u);
}

TEST_F(ToyDecoder, EncoderPredictorShapes) {
  const std::vector<std::string> in = {"w1", "w2", "w3", "w4", "w5", "w6", "w7"};
  const auto e = predictor.encoder_predictor(in);
  EXPECT_EQ(e.source.extended.size(), 7u);
  EXPECT_EQ(e.states.rows(), 7u);
  EXPECT_EQ(e.states.cols(), 16u);
  const auto again = predictor.encoder_predictor(in);
  EXPECT_EQ(e.states, again.states);
  EXPECT_EQ(e.source.extended, again.source.extended);
  EXPECT_EQ(error_code([&] { predictor.encoder_predictor({}); }), "empty_input");
}

TEST_F(ToyDecoder, DecoderPredictorFullDistributionSumsToOne) {
  const auto e = predictor.encoder_predictor(input(3));
  const std::vector<TokenId> prefix = {kBos};
  const auto all = predictor.decoder_predictor(e, prefix, e.extended_size());
  double total = 0.0;
  for (const auto& c : all) total += c.probability;
  EXPECT_NEAR(total, 1.0, 1e-6);
  for (std::size_t i = 1; i < all.size(); ++i) EXPECT_GE(all[i - 1].probability, all[i].probability);
}

TEST_F(ToyDecoder, DecoderPredictorAgreesWithFullSort) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto e = predictor.encoder_predictor(input(seed));
    const std::vector<TokenId> prefix = {kBos, 12, 15};
    const auto dist = model::decode_step(lm->params, prefix, e.states, e.source).mixed_dist.values();
    std::vector<std::size_t> order(dist.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return dist[a] > dist[b]; });
    const auto top = predictor.decoder_predictor(e, prefix, 5);
    for (std::size_t i = 0; i < 5; ++i) {
      EXPECT_EQ(top[i].index, order[i]);
      EXPECT_EQ(top[i].probability, dist[order[i]]);
      EXPECT_EQ(top[i].token, model::resolve_token(vocab, e.source, order[i]));
    }
    EXPECT_EQ(predictor.decoder_predictor(e, prefix, 1).front().index, order[0]);
  }
}

TEST_F(ToyDecoder, DecoderPredictorRejectsBadK) {
  const auto e = predictor.encoder_predictor(input(1));
  const std::vector<TokenId> prefix = {kBos};
  EXPECT_EQ(error_code([&] { predictor.decoder_predictor(e, prefix, 0); }), "invalid_k");
  EXPECT_EQ(error_code([&] { predictor.decoder_predictor(e, prefix, e.extended_size() + 1); }), "invalid_k");
}

TEST_F(ToyDecoder, SplitDecodeMatchesMonolithicOnRandomInputs) {
  BeamConfig cfg;
  cfg.max_len = 10;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto words = input(1000 + seed);
    // Cross the wire: serialise the encoder output and every candidate list.
    const auto encoded = decode::encoded_from_json(decode::to_json(predictor.encoder_predictor(words)));
    decode::StepFn step = [&](std::span<const TokenId> prefix, std::size_t k) {
      return decode::candidates_from_json(decode::to_json(predictor.decoder_predictor(encoded, prefix, k)));
    };
    const auto split = decode::beam_search(step, encoded.extended_size(), cfg);
    const auto mono = decode::beam_search_monolithic(lm->params, model::extend_source(vocab, words), cfg);
    ASSERT_EQ(split.size(), mono.size()) << seed;
    for (std::size_t i = 0; i < split.size(); ++i) {
      EXPECT_EQ(split[i].tokens, mono[i].tokens) << seed;
      EXPECT_EQ(split[i].log_prob, mono[i].log_prob) << seed;
    }
  }
}

TEST_F(ToyDecoder, BeamOfOneEqualsGreedy) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto e = predictor.encoder_predictor(input(seed));
    BeamConfig cfg;
    cfg.beam_size = 1;
    cfg.max_len = 12;
    cfg.length_alpha = 0.0;
    const auto beam = decode::beam_search(predictor, e, cfg);
    const auto greedy = decode::greedy_decode(predictor, e, 12);
    ASSERT_EQ(beam.size(), 1u);
    EXPECT_EQ(beam[0].tokens, greedy.tokens);
    EXPECT_EQ(beam[0].log_prob, greedy.log_prob);
  }
}

TEST(TableBeam, MatchesExhaustiveEnumeration) {
  for (double alpha : {0.0, 0.7, 1.0}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      TablePredictor t(seed);
      const auto e = t.encoder_predictor({});
      BeamConfig cfg;
      cfg.beam_size = 27;
      cfg.max_len = 3;
      cfg.length_alpha = alpha;
      const auto got = decode::beam_search(t, e, cfg);
      Best best;
      std::vector<TokenId> prefix = {kBos};
      enumerate(t, prefix, 0.0, 3, alpha, best);
      ASSERT_FALSE(got.empty());
      EXPECT_EQ(got[0].tokens, best.tokens) << "seed " << seed << " alpha " << alpha;
      EXPECT_NEAR(got[0].score, best.score, 1e-12);
    }
  }
}

TEST(TableBeam, HypothesesAreWellFormed) {
  TablePredictor t(4);
  const auto e = t.encoder_predictor({});
  BeamConfig cfg;
  cfg.beam_size = 3;
  cfg.max_len = 5;
  const auto hyps = decode::beam_search(t, e, cfg);
  EXPECT_LE(hyps.size(), 3u);
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto& h = hyps[i];
    EXPECT_EQ(h.tokens.front(), kBos);
    EXPECT_LE(h.log_prob, 0.0);
    EXPECT_LE(h.length(), 5u);
    if (h.finished && h.length() < 5) {
      EXPECT_EQ(h.tokens.back(), kEos);
    }
    for (std::size_t k = 1; k + 1 < h.tokens.size(); ++k) EXPECT_NE(h.tokens[k], kEos);
    if (i > 0) {
      EXPECT_GE(hyps[i - 1].score, h.score);
    }
  }
}

TEST_F(ToyDecoder, CallCountsStayWithinBounds) {
  for (std::size_t beam : {1u, 2u, 4u}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      predictor.reset_counters();
      const auto e = predictor.encoder_predictor(input(seed));
      BeamConfig cfg;
      cfg.beam_size = beam;
      cfg.max_len = 15;
      std::size_t steps = 0;
      const auto hyps = decode::beam_search(predictor, e, cfg, &steps);
      EXPECT_EQ(predictor.encoder_calls(), 1u);
      EXPECT_LE(steps, cfg.max_len);
      EXPECT_LE(predictor.decoder_calls(), steps * beam);
      std::size_t longest = 0;
      for (const auto& h : hyps) longest = std::max(longest, h.length());
      if (beam == 1) {
        EXPECT_EQ(predictor.decoder_calls(), longest);
      }
    }
  }
}

// Pruned beam search does not dominate greedy decoding in general (flat
// untrained distributions produce counterexamples), so the comparison runs
// on a trained toy model.
TEST(TrainedBeam, WiderBeamNeverScoresLowerWithoutLengthPenalty) {
  const auto vocab = testing::toy_vocab(20);
  const auto data = testing::random_pairs(vocab, 20, 32, 3, 6, 7);
  model::TrainHyper h;
  h.epochs = 30;
  h.batch_size = 4;
  h.adam.learning_rate = 3e-3;
  auto trained = model::train(testing::toy_config(vocab.size()), data, corpus::Objective::finetune, h, 3);
  auto lm = std::make_shared<model::LoadedModel>(model::LoadedModel{std::move(trained.params), vocab, "t"});
  decode::ModelPredictor pred(lm);
  numerics::Rng rng(77);
  for (int i = 0; i < 64; ++i) {
    const auto words = i < 32 ? data[static_cast<std::size_t>(i)].source.surface : testing::random_words(rng, 20, 3, 6);
    const auto e = pred.encoder_predictor(words);
    BeamConfig narrow;
    narrow.beam_size = 1;
    narrow.max_len = 12;
    narrow.length_alpha = 0.0;
    BeamConfig wide = narrow;
    wide.beam_size = 4;
    const auto a = decode::beam_search(pred, e, narrow);
    const auto b = decode::beam_search(pred, e, wide);
    EXPECT_GE(b[0].score, a[0].score) << i;
    EXPECT_GE(b[0].log_prob, decode::greedy_decode(pred, e, 12).log_prob) << i;
  }
}

TEST_F(ToyDecoder, MaxLenOneGivesSingleToken) {
  const auto e = predictor.encoder_predictor(input(2));
  const auto h = decode::greedy_decode(predictor, e, 1);
  EXPECT_EQ(h.length(), 1u);
  EXPECT_TRUE(h.finished);
  EXPECT_EQ(h.tokens, decode::greedy_decode(predictor, e, 1).tokens);
}

TEST_F(ToyDecoder, BeamParametersAreValidated) {
  const auto e = predictor.encoder_predictor(input(2));
  BeamConfig cfg;
  cfg.beam_size = 0;
  EXPECT_EQ(error_code([&] { decode::beam_search(predictor, e, cfg); }), "config_error");
  cfg.beam_size = 2;
  cfg.max_len = 0;
  EXPECT_EQ(error_code([&] { decode::beam_search(predictor, e, cfg); }), "config_error");
  EXPECT_EQ(error_code([&] { decode::greedy_decode(predictor, e, 0); }), "config_error");
}

TEST_F(ToyDecoder, NoRepeatTrigramBlocksRepeats) {
  BeamConfig cfg;
  cfg.max_len = 30;
  cfg.no_repeat_trigram = true;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto e = predictor.encoder_predictor(input(seed));
    for (const auto& h : decode::beam_search(predictor, e, cfg)) {
      std::map<std::vector<TokenId>, int> seen;
      for (std::size_t i = 0; i + 2 < h.tokens.size(); ++i) {
        const std::vector<TokenId> tri = {h.tokens[i], h.tokens[i + 1], h.tokens[i + 2]};
        EXPECT_EQ(++seen[tri], 1);
      }
    }
  }
}

TEST(CopyResolution, TemporaryIdsResolveToSourceTokens) {
  // Vocabulary knows w0..w9; sources also use w10..w14, which must be copied.
  const auto vocab = testing::toy_vocab(10);
  std::vector<model::TrainExample> data;
  numerics::Rng rng(5);
  for (int i = 0; i < 32; ++i) {
    const auto seq = testing::random_words(rng, 15, 3, 5);
    data.push_back(model::make_example(vocab, seq, seq));
  }
  model::TrainHyper h;
  h.epochs = 40;
  h.batch_size = 4;
  h.adam.learning_rate = 3e-3;
  auto trained = model::train(testing::toy_config(vocab.size()), data, corpus::Objective::finetune, h, 2);
  auto lm = std::make_shared<model::LoadedModel>(model::LoadedModel{std::move(trained.params), vocab, "c"});
  decode::ModelPredictor pred(lm);
  std::size_t temporary = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    numerics::Rng r(100 + seed);
    const auto words = testing::random_words(r, 15, 3, 5);
    const auto e = pred.encoder_predictor(words);
    for (const auto& hyp : decode::beam_search(pred, e, BeamConfig{})) {
      for (std::size_t i = 1; i < hyp.tokens.size(); ++i) {
        const auto id = hyp.tokens[i];
        if (id < vocab.size()) continue;
        ++temporary;
        const auto s = model::resolve_token(vocab, e.source, id);
        EXPECT_NE(std::find(words.begin(), words.end(), s), words.end()) << s;
      }
      const auto surf = decode::surface_tokens(vocab, e.source, hyp);
      EXPECT_EQ(surf.size() + 1, hyp.length() + (hyp.tokens.back() == kEos ? 0 : 1));
    }
  }
  EXPECT_GT(temporary, 0u);
}

TEST(Wire, EncodedSourceRoundTripsLosslessly) {
  const auto vocab = testing::toy_vocab(10);
  auto lm = std::make_shared<model::LoadedModel>(
      model::LoadedModel{model::ModelParams::initialize(testing::toy_config(vocab.size()), 1), vocab, "w"});
  decode::ModelPredictor pred(lm);
  const std::vector<std::string> words = {"w1", "novel", "w3"};
  const auto e = pred.encoder_predictor(words);
  const auto back = decode::encoded_from_json(decode::to_json(e));
  EXPECT_EQ(back.states, e.states);
  EXPECT_EQ(back.source.extended, e.source.extended);
  EXPECT_EQ(back.source.oov, e.source.oov);
  const auto cands = pred.decoder_predictor(e, std::vector<TokenId>{kBos}, 4);
  EXPECT_EQ(decode::candidates_from_json(decode::to_json(cands)), cands);
  EXPECT_EQ(error_code([] { decode::encoded_from_json("{\"vocab_size\": 3}"); }), "format_error");
}

}  // namespace
}  // namespace copygen
