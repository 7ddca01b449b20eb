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
#include <cstring>

#include <gtest/gtest.h>

#include "diacal/datagen.hpp"
#include "diacal/error.hpp"
#include "diacal/post_processing.hpp"
#include "diacal/spaces.hpp"

namespace diacal {
namespace {

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::uint64_t ensemble_hash(const SyntheticEnsemble& e) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (const auto& r : e.recordings) {
    h = fnv1a(h, r.activity.values.data(), static_cast<std::size_t>(r.activity.values.size()));
    for (const auto& z : r.system_logits) {
      h = fnv1a(h, z.values.data(), static_cast<std::size_t>(z.values.size()) * sizeof(double));
    }
  }
  return h;
}

GeneratorConfig small_config(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.frames = 200;
  cfg.num_recordings = 3;
  cfg.systems = {{"a", 2.0, 0.5, 1.0, 0.3}, {"b", 1.0, -0.2, 0.8, 0.0}};
  return cfg;
}

TEST(Prng, SplitMix64ReferenceOutputs) {
  std::uint64_t state = 1234567;
  EXPECT_EQ(splitmix64(state), 6457827717110365317ULL);
  EXPECT_EQ(splitmix64(state), 3203168211198807973ULL);
  EXPECT_EQ(splitmix64(state), 9817491932198370423ULL);
}

TEST(Prng, XoshiroMatchesIndependentTransliteration) {
  for (std::uint64_t stream : {0ULL, 1ULL, 77ULL}) {
    std::uint64_t sm = 42 ^ (stream * 0x9E3779B97F4A7C15ULL);
    std::uint64_t s[4];
    for (auto& w : s) w = splitmix64(sm);
    Xoshiro256ss rng(42, stream);
    for (int i = 0; i < 1000; ++i) {
      const std::uint64_t x = s[1] * 5;
      const std::uint64_t expected = ((x << 7) | (x >> 57)) * 9;
      const std::uint64_t t = s[1] << 17;
      s[2] ^= s[0];
      s[3] ^= s[1];
      s[1] ^= s[2];
      s[0] ^= s[3];
      s[2] ^= t;
      s[3] = (s[3] << 45) | (s[3] >> 19);
      ASSERT_EQ(rng.next(), expected);
    }
  }
}

TEST(Prng, UniformAndNormalMoments) {
  Xoshiro256ss rng(9);
  double sum = 0, sum_sq = 0, u_sum = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    u_sum += u;
    const double z = rng.normal();
    sum += z;
    sum_sq += z * z;
  }
  EXPECT_NEAR(u_sum / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(sum / n, 0.0, 4 / std::sqrt(n));
  EXPECT_NEAR(sum_sq / n, 1.0, 4 * std::sqrt(2.0 / n));
}

TEST(Generate, DeterministicAndPinned) {
  const SyntheticEnsemble a = generate(small_config(2024));
  const SyntheticEnsemble b = generate(small_config(2024));
  EXPECT_EQ(ensemble_hash(a), ensemble_hash(b));
  EXPECT_NE(ensemble_hash(a), ensemble_hash(generate(small_config(2025))));
  EXPECT_EQ(ensemble_hash(a), 6226883602279001886ULL);
}

TEST(Generate, RecordingsUseIndependentStreams) {
  GeneratorConfig few = small_config(5);
  GeneratorConfig many = few;
  many.num_recordings = 6;
  const SyntheticEnsemble a = generate(few);
  const SyntheticEnsemble b = generate(many);
  for (int r = 0; r < few.num_recordings; ++r) {
    EXPECT_EQ(a.recordings[r].system_logits[1].values, b.recordings[r].system_logits[1].values);
    EXPECT_EQ(a.recordings[r].reference, b.recordings[r].reference);
  }
}

TEST(Generate, ShapesAndReferenceMatchActivity) {
  const GeneratorConfig cfg = small_config(6);
  const SyntheticEnsemble e = generate(cfg);
  EXPECT_EQ(e.system_ids, (std::vector<std::string>{"a", "b"}));
  ASSERT_EQ(e.recordings.size(), 3u);
  for (const auto& r : e.recordings) {
    ASSERT_EQ(r.system_logits.size(), 2u);
    EXPECT_EQ(r.system_logits[0].frames(), cfg.frames);
    EXPECT_EQ(r.system_logits[0].kind, ScoreKind::kLogit);
    EXPECT_EQ(frame_targets(r.reference, cfg.frame_rate_hz, cfg.frames, {"spk0", "spk1"}).values,
              r.activity.values);
    const FrameScoreMatrix onehot = mult_to_power(FrameScoreMatrix{
        r.activity.values.cast<double>(), ScoreKind::kProbability, Space::kMultilabel, 2});
    EXPECT_EQ(onehot.values.rowwise().sum(), Vector::Ones(cfg.frames));
    EXPECT_EQ((onehot.values.array() == 1.0).count(), cfg.frames);
  }
}

TEST(Generate, StationaryRate) {
  GeneratorConfig cfg;
  cfg.frames = 100000;
  cfg.num_recordings = 4;
  cfg.systems = {{"a", 1.0, 0.0, 1.0, 0.0}};
  const double pi = cfg.stationary_rate();
  EXPECT_NEAR(pi, 0.05 / 0.07, 1e-15);
  double active = 0;
  for (const auto& r : generate(cfg).recordings) active += r.activity.values.cast<double>().sum();
  const double n = static_cast<double>(cfg.frames) * cfg.num_recordings * cfg.num_speakers;
  const double rate = active / n;
  EXPECT_NEAR(rate, pi, 0.02 * pi);
  // Asymptotic variance of a two-state chain mean: pi (1 - pi) (1 + lambda) / (1 - lambda) / n.
  const double lambda = 1.0 - cfg.p_on_given_off - cfg.p_off_given_on;
  const double se = std::sqrt(pi * (1 - pi) * (1 + lambda) / (1 - lambda) / n);
  EXPECT_NEAR(rate, pi, 3 * se);
}

TEST(Generate, SilentRecording) {
  GeneratorConfig cfg = small_config(7);
  cfg.p_on_given_off = 0.0;
  cfg.initial_state = InitialState::kOff;
  for (const auto& r : generate(cfg).recordings) {
    EXPECT_TRUE(r.reference.segments.empty());
    EXPECT_EQ(r.activity.values.cast<int>().sum(), 0);
  }
}

TEST(Generate, NoiselessLimitGivesZeroDer) {
  GeneratorConfig cfg = small_config(8);
  cfg.systems = {{"clean", 10.0, 0.0, 1e-9, 0.0}};
  for (const auto& r : generate(cfg).recordings) {
    const FrameScoreMatrix p = to_probabilities(r.system_logits[0]);
    EXPECT_LT((p.values - r.activity.values.cast<double>()).cwiseAbs().maxCoeff(), 1e-4);
    const Annotation hyp = activity_to_annotation(threshold_decisions(p));
    if (!r.reference.segments.empty()) EXPECT_EQ(compute_der(r.reference, hyp).der_pct(), 0.0);
  }
}

TEST(Generate, CrossSpeakerNoiseCorrelation) {
  GeneratorConfig cfg;
  cfg.frames = 50000;
  cfg.num_recordings = 1;
  cfg.systems = {{"a", 1.5, 0.3, 1.2, 0.6}};
  const SyntheticEnsemble e = generate(cfg);
  const auto& r = e.recordings[0];
  Matrix noise = r.system_logits[0].values;
  const auto& sys = cfg.systems[0];
  for (Eigen::Index i = 0; i < noise.size(); ++i) {
    noise.data()[i] -= sys.scale * (r.activity.values.data()[i] ? 1.0 : -1.0) + sys.bias;
  }
  const double c = noise.col(0).dot(noise.col(1)) / std::sqrt(noise.col(0).squaredNorm() * noise.col(1).squaredNorm());
  EXPECT_NEAR(c, 0.6, 0.02);
  EXPECT_NEAR(noise.col(0).squaredNorm() / cfg.frames, 1.44, 0.05);
}

TEST(Generate, RejectsInvalidConfigs) {
  GeneratorConfig cfg = small_config(1);
  cfg.systems[0].noise_sd = 0.0;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = small_config(1);
  cfg.systems[0].rho = 1.0;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = small_config(1);
  cfg.p_off_given_on = 1.5;
  EXPECT_THROW(generate(cfg), ConfigError);
  cfg = small_config(1);
  cfg.systems.clear();
  EXPECT_THROW(generate(cfg), ConfigError);
}

// Expected loss of the exact posterior by Simpson quadrature over z.
double bayes_bce_quadrature(double pi, double a, double b, double sd) {
  const double prior = std::log(pi / (1 - pi));
  auto softplus = [](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); };
  auto integrand = [&](double z) {
    const double l = prior + 2 * a * (z - b) / (sd * sd);
    auto pdf = [&](double mu) { return std::exp(-0.5 * std::pow((z - mu) / sd, 2)) / (sd * std::sqrt(2 * M_PI)); };
    return pi * pdf(b + a) * softplus(-l) + (1 - pi) * pdf(b - a) * softplus(l);
  };
  const double lo = b - std::abs(a) - 12 * sd;
  const double hi = b + std::abs(a) + 12 * sd;
  const int n = 20000;
  const double h = (hi - lo) / n;
  double sum = integrand(lo) + integrand(hi);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4 : 2) * integrand(lo + i * h);
  return sum * h / 3;
}

GeneratorConfig bayes_config(double a, double b, double sd, double p_on, double p_off) {
  GeneratorConfig cfg;
  cfg.p_on_given_off = p_on;
  cfg.p_off_given_on = p_off;
  cfg.systems = {{"s", a, b, sd, 0.0}};
  cfg.seed = 11;
  return cfg;
}

TEST(BayesBce, UninformativeScoresGivePriorEntropy) {
  const GeneratorConfig cfg = bayes_config(0.0, 0.3, 1.0, 0.05, 0.02);
  const double pi = cfg.stationary_rate();
  const double h = -pi * std::log(pi) - (1 - pi) * std::log(1 - pi);
  const MonteCarloEstimate est = bayes_bce(cfg, 0, 200000);
  EXPECT_NEAR(est.value, h, 4 * est.standard_error);
}

TEST(BayesBce, SharpScoresGiveNearZero) {
  EXPECT_LT(bayes_bce(bayes_config(20.0, 0.0, 1.0, 0.05, 0.02), 0, 100000).value, 1e-12);
}

TEST(BayesBce, PinnedMonteCarloValue) {
  // a = 2, b = 0, sd = 1, prior 0.5; seed 11, 10^6 samples.
  const GeneratorConfig cfg = bayes_config(2.0, 0.0, 1.0, 0.05, 0.05);
  const MonteCarloEstimate est = bayes_bce(cfg, 0);
  EXPECT_NEAR(est.value, bayes_bce_quadrature(0.5, 2.0, 0.0, 1.0), 4 * est.standard_error);
  EXPECT_DOUBLE_EQ(est.value, 0.060290502855441415);
  EXPECT_NEAR(est.standard_error, 3.2566e-4, 1e-8);
}

TEST(BayesBce, MatchesQuadratureOnSkewedPrior) {
  const GeneratorConfig cfg = bayes_config(1.3, -0.4, 0.9, 0.05, 0.02);
  const MonteCarloEstimate est = bayes_bce(cfg, 0, 400000);
  EXPECT_NEAR(est.value, bayes_bce_quadrature(cfg.stationary_rate(), 1.3, -0.4, 0.9), 4 * est.standard_error);
}

TEST(BayesBce, CorrelatedNoiseUnsupported) {
  GeneratorConfig cfg = bayes_config(2.0, 0.0, 1.0, 0.05, 0.02);
  cfg.systems[0].rho = 0.2;
  EXPECT_THROW(bayes_bce(cfg, 0), CapabilityError);
  EXPECT_THROW(bayes_bce(cfg, 3), ArgumentError);
}

}  // namespace
}  // namespace diacal
