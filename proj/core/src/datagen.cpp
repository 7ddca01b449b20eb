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

#include "diacal/datagen.hpp"

#include <cmath>
#include <numbers>

#include "diacal/error.hpp"

namespace diacal {
namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
// Stream ids at and above this value are reserved for Monte Carlo oracles.
constexpr std::uint64_t kOracleStreamBase = 1ULL << 62;

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Xoshiro256ss::Xoshiro256ss(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t sm = seed ^ (stream * kGolden);
  for (auto& word : s_) word = splitmix64(sm);
}

std::uint64_t Xoshiro256ss::next() {
  const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

double Xoshiro256ss::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256ss::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

double GeneratorConfig::stationary_rate() const {
  const double total = p_on_given_off + p_off_given_on;
  if (total <= 0.0) return initial_state == InitialState::kOn ? 1.0 : 0.0;
  return p_on_given_off / total;
}

void GeneratorConfig::validate() const {
  if (num_speakers < 1) throw ConfigError("generator needs at least one speaker");
  if (frames < 1 || num_recordings < 0) throw ConfigError("generator needs frames >= 1");
  if (!(frame_rate_hz > 0.0)) throw ConfigError("frame rate must be positive");
  for (double p : {p_on_given_off, p_off_given_on}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("transition probabilities must lie in [0, 1]");
  }
  if (systems.empty()) throw ConfigError("generator needs at least one system");
  for (const auto& s : systems) {
    if (!(s.noise_sd > 0.0)) throw ConfigError("noise_sd must be positive for system '" + s.id + "'");
    if (!(s.rho >= 0.0 && s.rho < 1.0)) throw ConfigError("rho must lie in [0, 1)");
    if (!std::isfinite(s.scale) || !std::isfinite(s.bias)) throw ConfigError("non-finite emission");
  }
}

GeneratorConfig GeneratorConfig::default_benchmark(std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.seed = seed;
  cfg.systems = {
      {"sysA", 1.0, 0.5, 1.2, 0.3},
      {"sysB", 1.3, -0.4, 1.5, 0.3},
      {"sysC", 0.9, 1.0, 1.1, 0.3},
  };
  return cfg;
}

SyntheticEnsemble generate(const GeneratorConfig& cfg) {
  cfg.validate();
  SyntheticEnsemble out;
  for (const auto& s : cfg.systems) out.system_ids.push_back(s.id);
  const double pi = cfg.stationary_rate();
  const int n_spk = cfg.num_speakers;

  std::vector<std::string> labels;
  for (int s = 0; s < n_spk; ++s) labels.push_back("spk" + std::to_string(s));

  for (int r = 0; r < cfg.num_recordings; ++r) {
    Xoshiro256ss rng(cfg.seed, static_cast<std::uint64_t>(r));
    SyntheticRecording rec;
    rec.recording_id = cfg.recording_prefix + std::to_string(r);
    rec.activity.values = ActivityValues::Zero(cfg.frames, n_spk);
    rec.activity.frame_rate_hz = cfg.frame_rate_hz;
    rec.activity.recording_id = rec.recording_id;

    for (int s = 0; s < n_spk; ++s) {
      const double u0 = rng.uniform();
      bool on = cfg.initial_state == InitialState::kOn ||
                (cfg.initial_state == InitialState::kStationary && u0 < pi);
      for (int t = 0; t < cfg.frames; ++t) {
        rec.activity.values(t, s) = on ? 1 : 0;
        const double u = rng.uniform();
        on = on ? !(u < cfg.p_off_given_on) : (u < cfg.p_on_given_off);
      }
    }
    rec.reference = activity_to_annotation(rec.activity, labels);

    for (const auto& sys : cfg.systems) {
      Matrix z(cfg.frames, n_spk);
      const double shared_w = std::sqrt(sys.rho);
      const double own_w = std::sqrt(1.0 - sys.rho);
      for (int t = 0; t < cfg.frames; ++t) {
        const double shared = rng.normal();
        for (int s = 0; s < n_spk; ++s) {
          const double noise = sys.noise_sd * (shared_w * shared + own_w * rng.normal());
          const double sign = rec.activity.values(t, s) ? 1.0 : -1.0;
          z(t, s) = sys.scale * sign + sys.bias + noise;
        }
      }
      FrameScoreMatrix m;
      m.values = std::move(z);
      m.kind = ScoreKind::kLogit;
      m.space = Space::kMultilabel;
      m.num_speakers = n_spk;
      m.frame_rate_hz = cfg.frame_rate_hz;
      m.recording_id = rec.recording_id;
      rec.system_logits.push_back(std::move(m));
    }
    out.recordings.push_back(std::move(rec));
  }
  return out;
}

double bayes_posterior_logit(const GeneratorConfig& cfg, const SystemEmission& emission, double z) {
  const double pi = cfg.stationary_rate();
  const double prior = std::log(pi) - std::log1p(-pi);
  const double var = emission.noise_sd * emission.noise_sd;
  return prior + 2.0 * emission.scale * (z - emission.bias) / var;
}

MonteCarloEstimate bayes_bce(const GeneratorConfig& cfg, std::size_t system, std::size_t samples) {
  cfg.validate();
  if (system >= cfg.systems.size()) throw ArgumentError("system index out of range");
  const SystemEmission& e = cfg.systems[system];
  if (e.rho != 0.0) {
    throw CapabilityError("closed-form Bayes BCE needs rho = 0; fit an empirical model instead");
  }
  if (samples < 2) throw ArgumentError("need at least two Monte Carlo samples");
  const double pi = cfg.stationary_rate();
  if (pi <= 0.0 || pi >= 1.0) return {0.0, 0.0};

  Xoshiro256ss rng(cfg.seed, kOracleStreamBase + system);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < samples; ++i) {
    const bool y = rng.uniform() < pi;
    const double z = e.scale * (y ? 1.0 : -1.0) + e.bias + e.noise_sd * rng.normal();
    const double l = bayes_posterior_logit(cfg, e, z);
    const double loss = y ? softplus(-l) : softplus(l);
    sum += loss;
    sum_sq += loss * loss;
  }
  const double n = static_cast<double>(samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

}  // namespace diacal
