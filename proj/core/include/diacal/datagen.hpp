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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "diacal/evaluation.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

/// xoshiro256** 1.0 (Blackman & Vigna), state seeded from SplitMix64.
/// Stream `k` of seed `s` seeds SplitMix64 with s ^ (k * 0x9E3779B97F4A7C15)
/// and takes its first four outputs as the state.
class Xoshiro256ss {
 public:
  explicit Xoshiro256ss(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next();
  /// 53-bit uniform in [0, 1).
  double uniform();
  /// Standard normal by the Box-Muller transform; values come in pairs.
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Emission model of one synthetic system: logit = scale * (2y - 1) + bias + noise,
/// where noise = noise_sd * (sqrt(rho) * shared + sqrt(1 - rho) * own) per speaker.
struct SystemEmission {
  std::string id;
  double scale = 2.0;
  double bias = 0.0;
  double noise_sd = 1.0;
  double rho = 0.0;
};

enum class InitialState { kStationary, kOff, kOn };

struct GeneratorConfig {
  int num_speakers = 2;
  int frames = 3000;
  double frame_rate_hz = kDefaultFrameRateHz;
  int num_recordings = 100;
  double p_on_given_off = 0.05;
  double p_off_given_on = 0.02;
  InitialState initial_state = InitialState::kStationary;
  std::vector<SystemEmission> systems;
  std::uint64_t seed = 0;
  std::string recording_prefix = "rec";

  /// Long-run fraction of active frames per speaker.
  double stationary_rate() const;
  void validate() const;

  /// Three heterogeneous, miscalibrated systems over 100 recordings of
  /// 3000 frames (5 minutes at 10 Hz).
  static GeneratorConfig default_benchmark(std::uint64_t seed = 0);
};

struct SyntheticRecording {
  std::string recording_id;
  BinaryActivityMatrix activity;
  Annotation reference;
  std::vector<FrameScoreMatrix> system_logits;  // one per system, multilabel logits
};

struct SyntheticEnsemble {
  std::vector<std::string> system_ids;
  std::vector<SyntheticRecording> recordings;
};

/// Recording r draws from stream r of cfg.seed: first the activity chains
/// (speaker by speaker), then per system and frame one shared and S own
/// normals.
SyntheticEnsemble generate(const GeneratorConfig& cfg);

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Expected BCE of the exact per-frame posterior P(y = 1 | z) of system
/// `system` (stationary prior, two-Gaussian likelihood ratio), by Monte Carlo.
/// Requires rho == 0 for that system (CapabilityError otherwise).
MonteCarloEstimate bayes_bce(const GeneratorConfig& cfg, std::size_t system,
                             std::size_t samples = 1'000'000);

/// Log-odds of the exact per-frame posterior for an observed logit z.
double bayes_posterior_logit(const GeneratorConfig& cfg, const SystemEmission& emission, double z);

}  // namespace diacal
