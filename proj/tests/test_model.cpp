// Copyright 2026 The gemkit Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>

#include "gemkit/error.hpp"
#include "gemkit/model.hpp"
#include "gemkit/rng.hpp"
#include "test_util.hpp"

namespace gemkit {
namespace {

using testing::random_sequence;
using testing::tiny_config;
using testing::tiny_words;

TEST(ModelConfig, Validates) {
  auto c = tiny_config();
  EXPECT_NO_THROW(c.validate());
  c.dim = 7;
  EXPECT_THROW(c.validate(), Error);
  c = tiny_config();
  c.vocab_size = kNumSpecials;
  EXPECT_THROW(c.validate(), Error);
  c = tiny_config();
  c.dropout = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c = tiny_config();
  c.n_prompt = kMaxPromptTokens + 1;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Model, InitShapesAndDeterminism) {
  const auto c = tiny_config();
  const Model a = Model::init(c, 1), b = Model::init(c, 1), d = Model::init(c, 2);
  const auto shapes = tensor_shapes(c);
  for (std::size_t i = 0; i < kTensors.size(); ++i) {
    const Mat& t = a.params.*kTensors[i].member;
    EXPECT_EQ(t.rows(), shapes[i].first) << kTensors[i].name;
    EXPECT_EQ(t.cols(), shapes[i].second) << kTensors[i].name;
    EXPECT_EQ(t, b.params.*kTensors[i].member) << kTensors[i].name;
  }
  EXPECT_NE(a.params.tok_emb, d.params.tok_emb);
  EXPECT_TRUE(a.params.all_finite());
  EXPECT_EQ(a.params.ln_out_g, Mat::Ones(1, static_cast<Eigen::Index>(c.dim)));
  EXPECT_EQ(a.params.ffn1_b.norm(), 0.0);
}

TEST(Model, RecurrentBlocksAreOrthogonal) {
  const auto c = tiny_config(40, 16);
  const Model m = Model::init(c, 4);
  const Eigen::Index h = 8;
  for (int g = 0; g < 4; ++g) {
    const Mat blk = m.params.lstm_fw_wh.block(g * h, 0, h, h);
    EXPECT_TRUE((blk * blk.transpose()).isIdentity(1e-10));
  }
}

TEST(Model, ParameterHelpers) {
  const Model m = Model::init(tiny_config(), 1);
  Parameters z = Parameters::zeros_like(m.params);
  EXPECT_EQ(z.count(), m.params.count());
  EXPECT_EQ(z.tok_emb.norm(), 0.0);
  z.tok_emb(0, 0) = std::nan("");
  EXPECT_FALSE(z.all_finite());
  z.set_zero();
  EXPECT_TRUE(z.all_finite());
}

TEST(Forward, MaskDistributionIsNormalized) {
  Rng rng(1);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  for (int t = 0; t < 20; ++t) {
    const auto seq = random_sequence(rng, c.vocab_size, 1 + rng.index(5), 1 + rng.index(5), true, true);
    const Vec p = forward_mask(seq, m, ForwardMode::sampled(static_cast<std::uint64_t>(t)));
    ASSERT_EQ(p.size(), static_cast<Eigen::Index>(c.vocab_size));
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(Forward, DropoutDeterminism) {
  Rng rng(2);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  const auto seq = random_sequence(rng, c.vocab_size, 4, 4, true, true);
  const Vec det1 = forward_mask(seq, m, ForwardMode::deterministic());
  const Vec det2 = forward_mask(seq, m, ForwardMode::deterministic());
  EXPECT_EQ(det1, det2);
  const Vec s1 = forward_mask(seq, m, ForwardMode::sampled(7));
  const Vec s2 = forward_mask(seq, m, ForwardMode::sampled(7));
  const Vec s3 = forward_mask(seq, m, ForwardMode::sampled(8));
  EXPECT_EQ(s1, s2);
  EXPECT_NE(s1, s3);
  EXPECT_NE(s1, det1);

  auto c0 = c;
  c0.dropout = 0.0;
  Model m0 = m;
  m0.config = c0;
  EXPECT_EQ(forward_mask(seq, m0, ForwardMode::sampled(7)), forward_mask(seq, m0, ForwardMode::deterministic()));
  EXPECT_EQ(forward_cls(seq, m0, ForwardMode::sampled(9)), forward_cls(seq, m0, ForwardMode::deterministic()));
}

TEST(Forward, ZeroEmbeddingsGiveSoftmaxOfOutputBias) {
  Rng rng(3);
  const auto c = tiny_config();
  Model m = Model::init(c, 3);
  m.params.tok_emb.setZero();
  for (Eigen::Index v = 0; v < m.params.out_bias.cols(); ++v) m.params.out_bias(0, v) = 0.01 * static_cast<double>(v);
  const auto seq = random_sequence(rng, c.vocab_size, 3, 3, true, true);
  const Vec p = forward_mask(seq, m, ForwardMode::deterministic());
  const Eigen::ArrayXd e = m.params.out_bias.row(0).transpose().array().exp();
  const Vec expect = (e / e.sum()).matrix();
  EXPECT_LT((p - expect).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Forward, ClassifierAnalyticCases) {
  Rng rng(4);
  const auto c = tiny_config();
  Model m = Model::init(c, 3);
  m.params.cls_w.setZero();
  m.params.cls_b(0, 0) = 0.0;
  m.params.cls_b(0, 1) = std::log(3.0);
  const auto seq = random_sequence(rng, c.vocab_size, 3, 3, false, false);
  const auto p = forward_cls(seq, m, ForwardMode::deterministic());
  EXPECT_NEAR(p[0], 0.25, 1e-15);
  EXPECT_NEAR(p[1], 0.75, 1e-15);
  m.params.cls_b.setZero();
  const auto q = forward_cls(seq, m, ForwardMode::sampled(1));
  EXPECT_NEAR(q[0], 0.5, 1e-15);
}

TEST(Forward, InputValidation) {
  Rng rng(5);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  auto seq = random_sequence(rng, c.vocab_size, 2, 2, false, false);
  EXPECT_THROW(forward_mask(seq, m, ForwardMode::deterministic()), Error);
  auto bad = seq;
  bad.tokens[0] = kNumSpecials;
  EXPECT_THROW(forward_cls(bad, m, ForwardMode::deterministic()), Error);
  bad = seq;
  bad.tokens[1] = static_cast<int>(c.vocab_size);
  EXPECT_THROW(forward_cls(bad, m, ForwardMode::deterministic()), Error);
  bad = seq;
  bad.segments.pop_back();
  EXPECT_THROW(forward_cls(bad, m, ForwardMode::deterministic()), Error);
  auto longseq = random_sequence(rng, c.vocab_size, 20, 20, false, true);
  EXPECT_THROW(forward_mask(longseq, m, ForwardMode::deterministic()), Error);
  auto no_prompt = c;
  no_prompt.n_prompt = 0;
  const Model mp = Model::init(no_prompt, 1);
  auto with_p = random_sequence(rng, c.vocab_size, 2, 2, true, true);
  EXPECT_THROW(forward_mask(with_p, mp, ForwardMode::deterministic()), Error);
}

TEST(Loss, MatchesClassDistribution) {
  Rng rng(6);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  const auto w = tiny_words();
  for (HeadMode head : {HeadMode::kPrompt, HeadMode::kClassifier}) {
    const auto seq = random_sequence(rng, c.vocab_size, 3, 4, true, true);
    const auto d = class_distribution(seq, m, head, w, ForwardMode::deterministic());
    EXPECT_NEAR(d[0] + d[1], 1.0, 1e-12);
    const double l1 = loss_and_grad(seq, m, head, w, Target::hard(1), ForwardMode::deterministic(), nullptr);
    EXPECT_NEAR(l1, -std::log(d[1]), 1e-12);
    const Target soft{{0.3, 0.7}};
    const double ls = loss_and_grad(seq, m, head, w, soft, ForwardMode::deterministic(), nullptr);
    EXPECT_NEAR(ls, -0.3 * std::log(d[0]) - 0.7 * std::log(d[1]), 1e-12);
  }
}

TEST(Loss, PromptDistributionIsNormalizedMeanWordProbability) {
  Rng rng(7);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  const auto w = tiny_words();
  const auto seq = random_sequence(rng, c.vocab_size, 3, 4, true, true);
  const Vec p = forward_mask(seq, m, ForwardMode::deterministic());
  const double s0 = (p(w.ids[0][0]) + p(w.ids[0][1])) / 2.0;
  const double s1 = p(w.ids[1][0]);
  const auto d = class_distribution(seq, m, HeadMode::kPrompt, w, ForwardMode::deterministic());
  EXPECT_NEAR(d[1], s1 / (s0 + s1), 1e-14);
}

TEST(Gradient, AccumulatesWithWeight) {
  Rng rng(8);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  const auto w = tiny_words();
  const auto seq = random_sequence(rng, c.vocab_size, 3, 3, true, true);
  Parameters g1 = Parameters::zeros_like(m.params), g2 = Parameters::zeros_like(m.params);
  loss_and_grad(seq, m, HeadMode::kPrompt, w, Target::hard(0), ForwardMode::sampled(3), &g1);
  loss_and_grad(seq, m, HeadMode::kPrompt, w, Target::hard(0), ForwardMode::sampled(3), &g2, 2.0);
  loss_and_grad(seq, m, HeadMode::kPrompt, w, Target::hard(0), ForwardMode::sampled(3), &g1);
  for (const auto& t : kTensors) {
    EXPECT_LT(((g1.*t.member) - (g2.*t.member)).cwiseAbs().maxCoeff(), 1e-12) << t.name;
  }
}

TEST(Gradient, MatchesFiniteDifferencesBothHeads) {
  Rng rng(9);
  const auto w = tiny_words();
  for (int trial = 0; trial < 3; ++trial) {
    const auto c = tiny_config(30, 4 + 2 * static_cast<std::size_t>(trial));
    const Model m = Model::init(c, static_cast<std::uint64_t>(trial) + 11);
    std::vector<TokenSequence> batch;
    std::vector<Target> targets;
    for (int k = 0; k < 2; ++k) {
      batch.push_back(random_sequence(rng, c.vocab_size, 2 + rng.index(3), 2 + rng.index(3), true, true));
      targets.push_back(Target::hard(k));
    }
    for (HeadMode head : {HeadMode::kPrompt, HeadMode::kClassifier}) {
      const auto rep = gradient_check(m, head, w, batch, targets, ForwardMode::sampled(static_cast<std::uint64_t>(trial)));
      EXPECT_LT(rep.max_rel_error, 1e-4) << "worst " << rep.worst_tensor;
      EXPECT_GT(rep.grad_norm, 0.0);
    }
  }
}

TEST(Gradient, ReachesPromptEmbeddings) {
  Rng rng(10);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  const auto seq = random_sequence(rng, c.vocab_size, 3, 3, true, true);
  Parameters g = Parameters::zeros_like(m.params);
  loss_and_grad(seq, m, HeadMode::kPrompt, tiny_words(), Target::hard(1), ForwardMode::deterministic(), &g);
  EXPECT_GT(g.prompt_emb.norm(), 0.0);
  EXPECT_GT(g.lstm_fw_wx.norm(), 0.0);
  EXPECT_GT(g.lstm_bw_wh.norm(), 0.0);
  const std::vector<TokenSequence> batch{seq};
  const std::vector<Target> targets{Target::hard(1)};
  const auto rep = gradient_check(m, HeadMode::kPrompt, tiny_words(), batch, targets);
  for (const auto& [name, err] : rep.per_tensor) {
    if (name == "prompt_emb" || name.rfind("lstm", 0) == 0) EXPECT_LT(err, 1e-4) << name;
  }
}

TEST(Gradient, VanishesWhenTargetEqualsPrediction) {
  Rng rng(11);
  const auto c = tiny_config();
  const Model m = Model::init(c, 3);
  const auto w = tiny_words();
  for (HeadMode head : {HeadMode::kPrompt, HeadMode::kClassifier}) {
    const auto seq = random_sequence(rng, c.vocab_size, 3, 3, true, true);
    const auto d = class_distribution(seq, m, head, w, ForwardMode::deterministic());
    Parameters g = Parameters::zeros_like(m.params);
    loss_and_grad(seq, m, head, w, Target{d}, ForwardMode::deterministic(), &g);
    double norm2 = 0.0;
    for (const auto& t : kTensors) norm2 += (g.*t.member).squaredNorm();
    EXPECT_LT(std::sqrt(norm2), 1e-8);
  }
}

}  // namespace
}  // namespace gemkit
