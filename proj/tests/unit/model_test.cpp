// Copyright 2026 The copygen Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>

#include <gtest/gtest.h>

#include "copygen/error.hpp"
#include "copygen/model/checkpoint.hpp"
#include "copygen/model/trainer.hpp"
#include "support/gradcheck.hpp"
#include "support/model_gradcheck.hpp"
#include "support/toy.hpp"

namespace copygen {
namespace {

using corpus::kBos;
using corpus::kEos;
using model::ModelConfig;
using model::ModelParams;
using numerics::Tensor;

double total(const Tensor& t) { return std::accumulate(t.data().begin(), t.data().end(), 0.0); }

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "";
}

class ToyModel : public ::testing::Test {
 protected:
  corpus::Vocab vocab = testing::toy_vocab(41);
  ModelConfig config = testing::toy_config(vocab.size());
  ModelParams params = ModelParams::initialize(config, 11);
  std::vector<std::string> src_words = {"w1", "w2", "zz", "w3", "zz"};
  model::SourceIds source = model::extend_source(vocab, src_words);
};

TEST(ModelConfig, RejectsInconsistentExtents) {
  ModelConfig c = testing::toy_config(20);
  EXPECT_NO_THROW(c.validate());
  c.heads = 3;
  EXPECT_EQ(error_code([&] { c.validate(); }), "config_error");
  c = testing::toy_config(20);
  c.encoder_layers = 0;
  EXPECT_EQ(error_code([&] { c.validate(); }), "config_error");
  c = testing::toy_config(0);
  EXPECT_EQ(error_code([&] { c.validate(); }), "config_error");
}

TEST(ModelParams, ShapesFollowConfig) {
  const auto c = testing::toy_config(30, 16, 2);
  const auto p = ModelParams::initialize(c, 1);
  EXPECT_EQ(p.get("embed.token").shape(), (numerics::Shape{30, 16}));
  EXPECT_EQ(p.get("out.w").shape(), (numerics::Shape{16, 30}));
  EXPECT_EQ(p.get("pgen.w").shape(), (numerics::Shape{48, 1}));
  EXPECT_EQ(p.get("dec.0.cross.wq").shape(), (numerics::Shape{16, 16}));
  EXPECT_EQ(p.positional().shape(), (numerics::Shape{64, 16}));
  EXPECT_TRUE(p.all_finite());
  EXPECT_EQ(p.names().size(), model::parameter_layout(c).size());
}

TEST(ModelParams, SameSeedSameValues) {
  const auto c = testing::toy_config(30);
  const auto a = ModelParams::initialize(c, 5), b = ModelParams::initialize(c, 5), d = ModelParams::initialize(c, 6);
  for (std::size_t i = 0; i < a.tensors().size(); ++i) EXPECT_EQ(a.tensors()[i], b.tensors()[i]);
  EXPECT_FALSE(a.get("out.w") == d.get("out.w"));
}

TEST(ExtendedVocab, OovSourceTokensGetTemporaryIds) {
  const auto vocab = testing::toy_vocab(5);
  const std::vector<std::string> src = {"w1", "alpha", "w2", "beta", "alpha"};
  const auto s = model::extend_source(vocab, src);
  const auto v = vocab.size();
  EXPECT_EQ(s.base, (std::vector<corpus::TokenId>{vocab.id("w1"), corpus::kUnk, vocab.id("w2"), corpus::kUnk, corpus::kUnk}));
  EXPECT_EQ(s.extended, (std::vector<corpus::TokenId>{vocab.id("w1"), v, vocab.id("w2"), v + 1, v}));
  EXPECT_EQ(s.extended_size(), v + 2);
  const std::vector<std::string> tgt = {"beta", "w1", "gamma"};
  EXPECT_EQ(model::extend_target(vocab, s, tgt), (std::vector<corpus::TokenId>{v + 1, vocab.id("w1"), corpus::kUnk, kEos}));
  EXPECT_EQ(model::resolve_token(vocab, s, v), "alpha");
  EXPECT_EQ(model::resolve_token(vocab, s, vocab.id("w2")), "w2");
  EXPECT_EQ(error_code([&] { model::resolve_token(vocab, s, v + 2); }), "index_error");
}

TEST_F(ToyModel, EncodeShapeAndDeterminism) {
  const std::vector<corpus::TokenId> ids = {10, 11, 12, 13, 14, 15, 16};
  const auto a = model::encode(params, ids);
  EXPECT_EQ(a.shape(), (numerics::Shape{7, config.d_model}));
  EXPECT_EQ(a, model::encode(params, ids));
}

TEST_F(ToyModel, EncodeRejectsEmptyAndOverlong) {
  EXPECT_EQ(error_code([&] { model::encode(params, {}); }), "empty_input");
  std::vector<corpus::TokenId> long_ids(config.max_positions + 1, 10);
  EXPECT_EQ(error_code([&] { model::encode(params, long_ids); }), "input_too_long");
  long_ids.pop_back();
  EXPECT_NO_THROW(model::encode(params, long_ids));
}

TEST_F(ToyModel, StepDistributionsAreNormalised) {
  const auto enc = model::encode(params, source.base);
  std::vector<corpus::TokenId> prefix = {kBos};
  for (corpus::TokenId next : {corpus::TokenId{10}, vocab.size(), corpus::TokenId{12}}) {
    const auto out = model::decode_step(params, prefix, enc, source);
    EXPECT_EQ(out.copy_dist.size(), 5u);
    EXPECT_EQ(out.mixed_dist.size(), source.extended_size());
    EXPECT_NEAR(total(out.vocab_dist), 1.0, 1e-6);
    EXPECT_NEAR(total(out.copy_dist), 1.0, 1e-6);
    EXPECT_NEAR(total(out.mixed_dist), 1.0, 1e-6);
    for (double w : out.copy_dist.data()) EXPECT_GE(w, 0.0);
    EXPECT_GE(out.p_gen, 0.0);
    EXPECT_LE(out.p_gen, 1.0);
    prefix.push_back(next);
  }
}

TEST_F(ToyModel, CopyDistIsHeadAverage) {
  const auto enc = model::encode(params, source.base);
  const std::vector<corpus::TokenId> prefix = {kBos, 10};
  const auto out = model::decode_step(params, prefix, enc, source);
  ASSERT_EQ(out.head_attention.size(), 2u);
  for (std::size_t i = 0; i < 5; ++i)
    EXPECT_NEAR(out.copy_dist[i], (out.head_attention[0][i] + out.head_attention[1][i]) / 2.0, 1e-15);
}

TEST(ModelStep, SingleHeadCopyEqualsAttentionRowExactly) {
  const auto vocab = testing::toy_vocab(20);
  const auto params = ModelParams::initialize(testing::toy_config(vocab.size(), 16, 1), 3);
  const std::vector<std::string> src = {"w4", "w5", "w6"};
  const auto s = model::extend_source(vocab, src);
  const auto out = model::decode_step(params, std::vector<corpus::TokenId>{kBos, 12}, model::encode(params, s.base), s);
  ASSERT_EQ(out.head_attention.size(), 1u);
  EXPECT_EQ(out.copy_dist, out.head_attention[0]);
}

TEST_F(ToyModel, PrefixMustStartWithBos) {
  const auto enc = model::encode(params, source.base);
  EXPECT_EQ(error_code([&] { model::decode_step(params, std::vector<corpus::TokenId>{10, 11}, enc, source); }),
            "invalid_prefix");
  EXPECT_EQ(error_code([&] { model::decode_step(params, std::vector<corpus::TokenId>{}, enc, source); }),
            "invalid_prefix");
}

TEST_F(ToyModel, SeededStepOutputIsFrozen) {
  const auto enc = model::encode(params, source.base);
  const auto out = model::decode_step(params, std::vector<corpus::TokenId>{kBos, 10, 11}, enc, source);
  EXPECT_NEAR(out.p_gen, 0.24430775015210676, 1e-12);
  const double copy[] = {0.20294952403822397, 0.20227662645573277, 0.2068479215312411, 0.15641680053956825,
                         0.23150912743523394};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(out.copy_dist[i], copy[i], 1e-12);
  EXPECT_NEAR(out.mixed_dist[10], 0.17306013317918537, 1e-12);
  EXPECT_NEAR(out.mixed_dist[vocab.size()], 0.33126302457015866, 1e-12);
}

TEST(MixedDistribution, GenerationOnlyLimit) {
  const auto vocab = Tensor::vector({0.1, 0.2, 0.3, 0.4});
  const auto copy = Tensor::vector({0.5, 0.5});
  const std::vector<corpus::TokenId> src = {1, 4};
  const auto mixed = model::mixed_distribution(vocab, copy, 1.0, src, 5);
  for (std::size_t w = 0; w < 4; ++w) EXPECT_EQ(mixed[w], vocab[w]);
  EXPECT_EQ(mixed[4], 0.0);
}

TEST(MixedDistribution, CopyOnlyLimitConfinesSupport) {
  const auto vocab = Tensor::vector({0.1, 0.2, 0.3, 0.4});
  const auto copy = Tensor::vector({0.25, 0.5, 0.25});
  const std::vector<corpus::TokenId> src = {2, 4, 2};
  const auto mixed = model::mixed_distribution(vocab, copy, 0.0, src, 5);
  EXPECT_EQ(mixed[0], 0.0);
  EXPECT_EQ(mixed[1], 0.0);
  EXPECT_EQ(mixed[3], 0.0);
  EXPECT_DOUBLE_EQ(mixed[2], 0.5);
  EXPECT_DOUBLE_EQ(mixed[4], 0.5);
}

TEST(MixedDistribution, HandMixture) {
  const auto vocab = Tensor::vector({0.25, 0.25, 0.25, 0.25});
  const auto copy = Tensor::vector({1.0});
  const std::vector<corpus::TokenId> src = {2};
  const auto mixed = model::mixed_distribution(vocab, copy, 0.5, src, 4);
  EXPECT_NEAR(mixed[2], 0.625, 1e-15);
  EXPECT_NEAR(mixed[0], 0.125, 1e-15);
  EXPECT_NEAR(total(mixed), 1.0, 1e-12);
}

TEST(MixedDistribution, RejectsInvalidPGen) {
  const auto vocab = Tensor::vector({0.5, 0.5});
  const auto copy = Tensor::vector({1.0});
  const std::vector<corpus::TokenId> src = {0};
  EXPECT_EQ(error_code([&] { model::mixed_distribution(vocab, copy, 1.5, src, 2); }), "invalid_probability");
  EXPECT_EQ(error_code([&] { model::mixed_distribution(vocab, copy, -0.1, src, 2); }), "invalid_probability");
  EXPECT_EQ(error_code([&] { model::mixed_distribution(vocab, copy, std::nan(""), src, 2); }), "invalid_probability");
}

TEST(PointerMix, GradientMatchesFiniteDifferences) {
  numerics::Rng rng(8);
  const std::vector<corpus::TokenId> src = {1, 5, 1};
  testing::LossFn fn = [&](numerics::Tape&, const std::vector<numerics::Var>& in) {
    auto mixed = model::pointer_mix(numerics::softmax(in[0], 1), numerics::softmax(in[1], 1), numerics::sigmoid(in[2]),
                                    src, 6);
    const std::vector<std::size_t> targets = {1, 5};
    return numerics::mean_row_nll(mixed, targets);
  };
  const auto r = testing::gradient_check(
      fn, {testing::random_tensor(rng, {2, 4}), testing::random_tensor(rng, {2, 3}), testing::random_tensor(rng, {2, 1})});
  EXPECT_LT(r.max_relative_error, 1e-4);
}

TEST(SequenceNll, UniformModelGivesLogV) {
  auto c = testing::toy_config(8);
  c.pointer = false;
  auto p = ModelParams::initialize(c, 2);
  for (const char* name : {"out.w", "out.b"})
    for (auto& x : p.mutable_tensors()[p.index_of(name)].mutable_data()) x = 0.0;
  const auto s = model::source_from_ids(8, std::vector<corpus::TokenId>{4, 5, 6});
  const std::vector<corpus::TokenId> target = {5, 6, 4, 7, kEos};
  EXPECT_NEAR(model::sequence_nll(p, s, target), std::log(8.0), 1e-12);
}

TEST_F(ToyModel, LossMatchesStepByStepRecomputation) {
  const std::vector<std::string> tgt = {"w3", "zz", "w9", "w1"};
  const auto target = model::extend_target(vocab, source, tgt);
  const auto enc = model::encode(params, source.base);
  std::vector<corpus::TokenId> prefix = {kBos};
  double sum = 0.0;
  for (auto y : target) {
    const auto step = model::decode_step(params, prefix, enc, source);
    sum += -std::log(std::max(step.mixed_dist[y], numerics::kProbabilityFloor));
    prefix.push_back(y);
  }
  const double loss = model::sequence_nll(params, source, target);
  EXPECT_NEAR(loss, sum / static_cast<double>(target.size()), 1e-10);
  EXPECT_GT(loss, 0.0);
  EXPECT_TRUE(std::isfinite(loss));
}

TEST_F(ToyModel, LossRejectsMalformedTargets) {
  EXPECT_EQ(error_code([&] { model::sequence_nll(params, source, {}); }), "empty_target");
  EXPECT_EQ(error_code([&] { model::sequence_nll(params, source, std::vector<corpus::TokenId>{10, 11}); }),
            "invalid_target");
}

TEST(ModelGradient, FullLossMatchesFiniteDifferences) {
  const auto vocab = testing::toy_vocab(41);
  const auto params = ModelParams::initialize(testing::toy_config(vocab.size(), 16, 2), 11);
  const std::vector<std::string> src = {"w1", "w2", "zz", "w3", "zz"};
  const auto ex = model::make_example(vocab, src, std::vector<std::string>{"w3", "zz", "w9"});
  const auto r = testing::model_gradient_check(params, ex, 8);
  EXPECT_GT(r.checked, 300u);
  EXPECT_LT(r.max_relative_error, 1e-4);
  EXPECT_LT(r.norm_relative_error, 1e-6);
}

class Training : public ::testing::Test {
 protected:
  corpus::Vocab vocab = testing::toy_vocab(12);
  std::vector<model::TrainExample> data = testing::copy_task(vocab, 12, 32, 3, 5, 99);
  ModelConfig config = testing::toy_config(vocab.size());
};

TEST_F(Training, LossStrictlyDecreasesOverFirstEpochs) {
  model::TrainHyper h;
  h.epochs = 5;
  h.adam.learning_rate = 3e-3;
  const auto r = model::train(config, data, corpus::Objective::finetune, h, 4);
  ASSERT_EQ(r.epoch_losses.size(), 5u);
  for (std::size_t e = 1; e < 5; ++e) EXPECT_LT(r.epoch_losses[e], r.epoch_losses[e - 1]) << "epoch " << e;
}

TEST_F(Training, ZeroLearningRateLeavesParametersUntouched) {
  model::TrainHyper h;
  h.epochs = 2;
  h.adam.learning_rate = 0.0;
  const auto init = ModelParams::initialize(config, 4);
  const auto r = model::train(init, data, corpus::Objective::finetune, h, 4);
  for (std::size_t i = 0; i < init.tensors().size(); ++i) EXPECT_EQ(init.tensors()[i], r.params.tensors()[i]);
}

TEST_F(Training, SameSeedSameCurve) {
  model::TrainHyper h;
  h.epochs = 2;
  config.dropout = 0.1;
  const auto a = model::train(config, data, corpus::Objective::sentence_reordering, h, 9);
  const auto b = model::train(config, data, corpus::Objective::sentence_reordering, h, 9);
  EXPECT_EQ(a.epoch_losses, b.epoch_losses);
  EXPECT_EQ(a.params.get("out.w"), b.params.get("out.w"));
}

TEST_F(Training, RejectsEmptyDataset) {
  EXPECT_EQ(error_code([&] { model::train(config, {}, corpus::Objective::finetune, {}, 1); }), "empty_dataset");
}

TEST_F(Training, DivergenceIsReported) {
  model::TrainHyper h;
  h.epochs = 1;
  h.clip_norm = 0.0;
  auto p = ModelParams::initialize(config, 1);
  p.mutable_tensors()[p.index_of("out.b")].mutable_data()[0] = std::nan("");
  EXPECT_EQ(error_code([&] { model::train(p, data, corpus::Objective::finetune, h, 1); }), "training_diverged");
}

class Checkpoints : public ToyModel {
 protected:
  std::filesystem::path dir = std::filesystem::temp_directory_path() /
                              ("copygen_ckpt_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                               "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
  void SetUp() override { std::filesystem::create_directories(dir); }
  void TearDown() override { std::filesystem::remove_all(dir); }
};

TEST_F(Checkpoints, RoundTripIsBitExact) {
  const auto path = dir / "m.apcg";
  model::save_checkpoint(params, path);
  const auto back = model::load_checkpoint(path);
  EXPECT_EQ(back.config(), params.config());
  ASSERT_EQ(back.names().size(), params.names().size());
  for (std::size_t i = 0; i < params.tensors().size(); ++i) {
    EXPECT_EQ(back.names()[i], params.names()[i]);
    EXPECT_EQ(back.tensors()[i], params.tensors()[i]);
  }
}

TEST_F(Checkpoints, SinglePrecisionRoundTripsAtStoredPrecision) {
  const auto path = dir / "m32.apcg";
  model::save_checkpoint(params, path, model::StoredPrecision::f32);
  const auto back = model::load_checkpoint(path);
  for (std::size_t i = 0; i < params.tensors().size(); ++i)
    for (std::size_t k = 0; k < params.tensors()[i].size(); ++k)
      EXPECT_EQ(back.tensors()[i][k], static_cast<double>(static_cast<float>(params.tensors()[i][k])));
}

TEST_F(Checkpoints, TruncatedOrCorruptFileIsIncompatible) {
  const auto path = dir / "m.apcg";
  model::save_checkpoint(params, path);
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size / 2);
  EXPECT_EQ(error_code([&] { model::load_checkpoint(path); }), "incompatible_checkpoint");

  model::save_checkpoint(params, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XPCG", 4);
  }
  EXPECT_EQ(error_code([&] { model::load_checkpoint(path); }), "incompatible_checkpoint");

  model::save_checkpoint(params, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(static_cast<std::streamoff>(size / 2));
    f.put('\x7f');
  }
  EXPECT_EQ(error_code([&] { model::load_checkpoint(path); }), "incompatible_checkpoint");

  model::save_checkpoint(params, path);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const char v2[4] = {2, 0, 0, 0};
    f.write(v2, 4);
  }
  EXPECT_EQ(error_code([&] { model::load_checkpoint(path); }), "incompatible_checkpoint");
}

TEST_F(Checkpoints, VocabSizeMismatchSurfacesAtLoad) {
  const auto path = dir / "m.apcg";
  model::save_checkpoint(params, path);
  EXPECT_EQ(error_code([&] { model::load_checkpoint(path, vocab.size() + 1); }), "vocab_mismatch");
  EXPECT_NO_THROW(model::load_checkpoint(path, vocab.size()));

  model::save_model(params, vocab, path);
  testing::toy_vocab(7).save(model::vocab_path_for(path));
  EXPECT_EQ(error_code([&] { model::load_model(path); }), "vocab_mismatch");
}

TEST_F(Checkpoints, ModelBundleCarriesVersion) {
  const auto path = dir / "m.apcg";
  model::save_model(params, vocab, path);
  const auto loaded = model::load_model(path);
  EXPECT_EQ(loaded.vocab.tokens(), vocab.tokens());
  EXPECT_EQ(loaded.version.size(), 8u);
  EXPECT_EQ(loaded.version, model::checkpoint_version(path));
}

}  // namespace
}  // namespace copygen
