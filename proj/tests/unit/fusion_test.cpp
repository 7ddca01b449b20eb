// Copyright 2026 The diacal Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "diacal/error.hpp"
#include "diacal/fusion.hpp"
#include "diacal/spaces.hpp"
#include "test_support.hpp"

namespace diacal {
namespace {

double sigmoid_ld(long double z) { return static_cast<double>(1.0L / (1.0L + std::exp(-z))); }
long double logit_ld(long double p) { return std::log(p / (1.0L - p)); }

FusionInput input(std::vector<FrameScoreMatrix> systems) {
  FusionInput in;
  for (std::size_t m = 0; m < systems.size(); ++m) in.system_ids.push_back("sys" + std::to_string(m));
  in.systems = std::move(systems);
  return in;
}

FrameScoreMatrix row(std::initializer_list<double> v, Space space = Space::kMultilabel, int speakers = 0) {
  FrameScoreMatrix m;
  m.space = space;
  m.values.resize(1, static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) m.values(0, i++) = x;
  m.num_speakers = speakers > 0 ? speakers : static_cast<int>(v.size());
  return m;
}

using UnsupervisedRule = FrameScoreMatrix (*)(const FusionInput&);
FrameScoreMatrix avg_logits(const FusionInput& in) { return average_logits(in); }
FrameScoreMatrix dyn_logits(const FusionInput& in) { return dynamic_logits(in); }
const std::vector<std::pair<const char*, UnsupervisedRule>> kRules = {
    {"average_probs", &average_probs},
    {"average_logits", &avg_logits},
    {"dynamic_logits", &dyn_logits},
    {"entropy", &entropy_fusion},
};

TEST(AlignSystems, SwapAndIdentity) {
  std::mt19937_64 rng(51);
  const FrameScoreMatrix anchor = testing::random_mult(100, 2, rng);
  FrameScoreMatrix swapped = anchor;
  swapped.values = permute_columns(anchor.values, {1, 0});
  const std::vector<FrameScoreMatrix> others{anchor, swapped};
  const auto perms = align_systems(anchor, others);
  EXPECT_EQ(perms[0], (Permutation{0, 1}));
  EXPECT_EQ(perms[1], (Permutation{1, 0}));
  EXPECT_EQ(permute_speakers(swapped, perms[1]).values, anchor.values);
}

TEST(AlignSystems, NoisySwappedCopyMatchesBruteForce) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> noise(0.0, 0.05);
  for (int trial = 0; trial < 50; ++trial) {
    const FrameScoreMatrix anchor = testing::random_mult(100, 2, rng);
    FrameScoreMatrix other = anchor;
    other.values = permute_columns(anchor.values, {1, 0});
    for (Eigen::Index i = 0; i < other.values.size(); ++i) {
      other.values.data()[i] = std::clamp(other.values.data()[i] + noise(rng), 0.0, 1.0);
    }
    double cost_id = (other.values - anchor.values).squaredNorm();
    double cost_swap = (permute_columns(other.values, {1, 0}) - anchor.values).squaredNorm();
    const Permutation expected = cost_swap < cost_id ? Permutation{1, 0} : Permutation{0, 1};
    EXPECT_EQ(align_systems(anchor, std::vector<FrameScoreMatrix>{other})[0], expected);
    EXPECT_EQ(expected, (Permutation{1, 0}));
  }
}

TEST(PermuteSpeakers, PowersetFollowsMultilabel) {
  std::mt19937_64 rng(53);
  const FrameScoreMatrix p = testing::random_mult(20, 3, rng);
  const Permutation perm{2, 0, 1};
  const FrameScoreMatrix a = mult_to_power(permute_speakers(p, perm));
  const FrameScoreMatrix b = permute_speakers(mult_to_power(p), perm);
  EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(AverageProbs, Examples) {
  const FrameScoreMatrix out = average_probs(input({row({0.2}), row({0.8})}));
  EXPECT_DOUBLE_EQ(out.values(0, 0), 0.5);
  std::mt19937_64 rng(54);
  const FrameScoreMatrix fused =
      average_probs(input({testing::random_power(50, 2, rng), testing::random_power(50, 2, rng),
                           testing::random_power(50, 2, rng)}));
  for (Eigen::Index t = 0; t < fused.frames(); ++t) EXPECT_NEAR(fused.values.row(t).sum(), 1.0, 1e-12);
}

TEST(AverageLogits, Examples) {
  EXPECT_DOUBLE_EQ(average_logits(input({row({0.5, 0.5}), row({0.5, 0.5})})).values(0, 0), 0.5);
  const FrameScoreMatrix same = average_logits(input({row({0.9}), row({0.9})}));
  EXPECT_NEAR(same.values(0, 0), 0.9, 1e-9);
  const double got = average_logits(input({row({0.6}), row({0.99})})).values(0, 0);
  const double expected = sigmoid_ld((logit_ld(0.6L) + logit_ld(0.99L)) / 2.0L);
  EXPECT_NEAR(got, expected, 1e-12);
  EXPECT_GT(got, average_probs(input({row({0.6}), row({0.99})})).values(0, 0));
  EXPECT_NEAR(average_probs(input({row({0.6}), row({0.99})})).values(0, 0), 0.795, 1e-12);
}

TEST(DynamicLogits, HandExample) {
  const FrameScoreMatrix a = row({sigmoid_ld(2.0L), sigmoid_ld(-2.0L)});
  const FrameScoreMatrix b = row({sigmoid_ld(1.0L), sigmoid_ld(-1.0L)});
  const FrameScoreMatrix out = dynamic_logits(input({a, b}));
  EXPECT_NEAR(out.values(0, 0), sigmoid_ld(5.0L / 3.0L), 1e-9);
  EXPECT_NEAR(out.values(0, 1), sigmoid_ld(-5.0L / 3.0L), 1e-9);
}

TEST(DynamicLogits, AllZeroLogitsFallBackToEqualWeights) {
  const FrameScoreMatrix out = dynamic_logits(input({row({0.5, 0.5}), row({0.5, 0.5}), row({0.5, 0.5})}));
  EXPECT_EQ(out.values(0, 0), 0.5);
  EXPECT_EQ(out.values(0, 1), 0.5);
}

TEST(EntropyFusion, PowersetExtremes) {
  const FrameScoreMatrix uniform = row({0.25, 0.25, 0.25, 0.25}, Space::kPowerset, 2);
  const FrameScoreMatrix onehot = row({0, 0, 1, 0}, Space::kPowerset, 2);
  EXPECT_EQ(entropy_fusion(input({uniform, onehot})).values, onehot.values);
}

TEST(EntropyFusion, MultilabelWeightClampedAtZero) {
  const double inv_e = std::exp(-1.0);
  EXPECT_GT(2.0 * inv_e, std::log(2.0));
  const FrameScoreMatrix high = row({inv_e, inv_e});
  const FrameScoreMatrix low = row({0.9, 0.9});
  const FrameScoreMatrix out = entropy_fusion(input({high, low}));
  EXPECT_LT((out.values - low.values).cwiseAbs().maxCoeff(), 1e-15);
  const FrameScoreMatrix both_high = entropy_fusion(input({high, row({0.4, 0.4})}));
  EXPECT_NEAR(both_high.values(0, 0), (inv_e + 0.4) / 2.0, 1e-15);
}

TEST(UnsupervisedFusion, IdempotentOnIdenticalInputs) {
  std::mt19937_64 rng(55);
  for (Space space : {Space::kMultilabel, Space::kPowerset}) {
    const FrameScoreMatrix p = space == Space::kMultilabel ? testing::random_mult(200, 3, rng)
                                                           : testing::random_power(200, 3, rng);
    for (const auto& [name, rule] : kRules) {
      for (std::size_t m : {1u, 2u, 4u}) {
        const FrameScoreMatrix out = rule(input(std::vector<FrameScoreMatrix>(m, p)));
        EXPECT_LT((out.values - p.values).cwiseAbs().maxCoeff(), 1e-9) << name << " M=" << m;
      }
    }
  }
}

TEST(UnsupervisedFusion, OutputsAreValidAndOrderFree) {
  std::mt19937_64 rng(56);
  for (Space space : {Space::kMultilabel, Space::kPowerset}) {
    std::vector<FrameScoreMatrix> systems;
    for (int m = 0; m < 3; ++m) {
      systems.push_back(space == Space::kMultilabel ? testing::random_mult(100, 2, rng, 0.0, 1.0)
                                                    : testing::random_power(100, 2, rng));
    }
    std::vector<FrameScoreMatrix> reversed(systems.rbegin(), systems.rend());
    for (const auto& [name, rule] : kRules) {
      const FrameScoreMatrix a = rule(input(systems));
      EXPECT_NO_THROW(a.validate(1e-12)) << name;
      const FrameScoreMatrix b = rule(input(reversed));
      EXPECT_LT((a.values - b.values).cwiseAbs().maxCoeff(), 1e-12) << name;
    }
  }
}

TEST(FuseInSpace, AveragingDependsOnSpace) {
  // Averaging then mapping to powerset equals mapping then averaging only for M = 1.
  std::mt19937_64 rng(57);
  const FrameScoreMatrix a = testing::random_mult(20, 2, rng);
  const FrameScoreMatrix b = testing::random_mult(20, 2, rng);
  const Matrix one_a = mult_to_power(average_probs(input({a}))).values;
  const Matrix one_b = average_probs(input({mult_to_power(a)})).values;
  EXPECT_LT((one_a - one_b).cwiseAbs().maxCoeff(), 1e-15);
  const Matrix two_a = fuse(input({a, b}), FusionMethod::kAverageProbs, Space::kMultilabel).values;
  const Matrix two_b = fuse(input({a, b}), FusionMethod::kAverageProbs, Space::kPowerset).values;
  EXPECT_GT((mult_to_power(testing::mult_probs(two_a)).values - two_b).cwiseAbs().maxCoeff(), 1e-3);
}

MetaLearnerTrainingSet meta_set(const std::vector<FrameScoreMatrix>& probs, const Matrix& targets, Space space) {
  MetaLearnerTrainingSet set;
  set.space = space;
  set.num_speakers = static_cast<int>(targets.cols());
  set.multilabel_targets = targets;
  for (std::size_t m = 0; m < probs.size(); ++m) {
    set.system_ids.push_back("sys" + std::to_string(m));
    set.logits.push_back(to_logits(to_space(probs[m], space)).values);
  }
  return set;
}

struct NoisyEnsemble {
  std::vector<FrameScoreMatrix> systems;
  Matrix targets;
};

NoisyEnsemble noisy_ensemble(Eigen::Index n, int m_systems, std::mt19937_64& rng) {
  std::normal_distribution<double> noise(0.0, 1.0);
  std::bernoulli_distribution active(0.4);
  NoisyEnsemble e;
  e.targets.resize(n, 2);
  for (Eigen::Index i = 0; i < e.targets.size(); ++i) e.targets.data()[i] = active(rng) ? 1.0 : 0.0;
  for (int m = 0; m < m_systems; ++m) {
    FrameScoreMatrix p = testing::mult_probs(Matrix(n, 2));
    const double scale = 1.0 + 0.5 * m;
    for (Eigen::Index i = 0; i < p.values.size(); ++i) {
      p.values.data()[i] = sigmoid_ld(scale * (2 * e.targets.data()[i] - 1) + 0.3 * m + noise(rng));
    }
    e.systems.push_back(p);
  }
  return e;
}

TEST(MetaLearner, ContainsEverySingleSystemRecalibration) {
  std::mt19937_64 rng(58);
  for (Space space : {Space::kMultilabel, Space::kPowerset}) {
    NoisyEnsemble e = noisy_ensemble(4000, 2, rng);
    e.systems.push_back(e.systems[0]);  // duplicate of system 0
    const MetaLearnerTrainingSet set = meta_set(e.systems, e.targets, space);
    RegressionResult meta;
    fit_metalearner(set, {}, &meta);
    for (std::size_t m = 0; m < e.systems.size(); ++m) {
      MetaLearnerTrainingSet single = set;
      single.logits = {set.logits[m]};
      single.system_ids = {set.system_ids[m]};
      RegressionResult one;
      fit_metalearner(single, {}, &one);
      EXPECT_LE(meta.objective, one.objective + 1e-9);
      EXPECT_LE(meta.cross_entropy, one.cross_entropy + 1e-6);
    }
  }
}

TEST(MetaLearner, NullDataGivesPriors) {
  std::mt19937_64 rng(59);
  std::bernoulli_distribution coin(0.3);
  const Eigen::Index n = 100000;
  std::vector<FrameScoreMatrix> systems{testing::random_mult(n, 2, rng), testing::random_mult(n, 2, rng)};
  Matrix y(n, 2);
  for (Eigen::Index i = 0; i < y.size(); ++i) y.data()[i] = coin(rng) ? 1.0 : 0.0;
  const MetaLearnerModel m = fit_metalearner(meta_set(systems, y, Space::kMultilabel));
  EXPECT_LT(m.weights.norm(), 0.1);
  for (int s = 0; s < 2; ++s) {
    const double rate = y.col(s).mean();
    EXPECT_NEAR(m.bias(s), std::log(rate / (1 - rate)), 0.05);
  }
}

TEST(MetaLearner, ZeroModelGivesUniformOutputs) {
  std::mt19937_64 rng(60);
  for (Space space : {Space::kMultilabel, Space::kPowerset}) {
    MetaLearnerModel m;
    m.space = space;
    m.num_speakers = 2;
    m.m_systems = 2;
    m.system_ids = {"sys0", "sys1"};
    const int d = m.dims();
    m.weights = Matrix::Zero(d, 2 * d);
    m.bias = Vector::Zero(d);
    const FrameScoreMatrix a = to_space(testing::random_mult(10, 2, rng), space);
    const FrameScoreMatrix b = to_space(testing::random_mult(10, 2, rng), space);
    const FrameScoreMatrix out = apply_metalearner(m, input({a, b}));
    EXPECT_LT((out.values.array() - 1.0 / d).abs().maxCoeff(), 1e-15);
  }
}

TEST(MetaLearner, RejectsSystemOrderMismatch) {
  std::mt19937_64 rng(61);
  const NoisyEnsemble e = noisy_ensemble(500, 2, rng);
  const MetaLearnerModel m = fit_metalearner(meta_set(e.systems, e.targets, Space::kMultilabel));
  FusionInput in = input(e.systems);
  EXPECT_NO_THROW(apply_metalearner(m, in));
  std::swap(in.system_ids[0], in.system_ids[1]);
  EXPECT_THROW(apply_metalearner(m, in), ContractError);
}

TEST(MetaLearner, ReproducesTrainingLoss) {
  std::mt19937_64 rng(62);
  const NoisyEnsemble e = noisy_ensemble(2000, 3, rng);
  for (Space space : {Space::kMultilabel, Space::kPowerset}) {
    const MetaLearnerTrainingSet set = meta_set(e.systems, e.targets, space);
    RegressionResult r;
    const MetaLearnerModel m = fit_metalearner(set, {}, &r);
    EXPECT_NEAR(metalearner_cross_entropy(m, set), r.cross_entropy, 1e-9);
  }
}

TEST(MetaLearner, RejectsMismatchedFrameCounts) {
  std::mt19937_64 rng(63);
  const NoisyEnsemble e = noisy_ensemble(100, 2, rng);
  MetaLearnerTrainingSet set = meta_set(e.systems, e.targets, Space::kMultilabel);
  set.logits[1].conservativeResize(50, Eigen::NoChange);
  EXPECT_THROW(fit_metalearner(set), ContractError);
}

TEST(Fuse, NoneReturnsFirstSystemAndMetaNeedsModel) {
  std::mt19937_64 rng(64);
  const FrameScoreMatrix a = testing::random_mult(10, 2, rng);
  const FrameScoreMatrix b = testing::random_mult(10, 2, rng);
  EXPECT_EQ(fuse(input({a, b}), FusionMethod::kNone, Space::kMultilabel).values, a.values);
  EXPECT_THROW(fuse(input({a, b}), FusionMethod::kMetaLearner, Space::kMultilabel), ContractError);
  FrameScoreMatrix short_b = b;
  short_b.values.conservativeResize(5, Eigen::NoChange);
  EXPECT_THROW(average_probs(input({a, short_b})), ContractError);
}

}  // namespace
}  // namespace diacal
