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

#include <atomic>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

#include "diacal/datagen.hpp"
#include "diacal/pipeline.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal::testing {

/// Random multilabel probabilities in (lo, hi).
inline FrameScoreMatrix random_mult(Eigen::Index frames, int speakers, std::mt19937_64& rng,
                                    double lo = 0.01, double hi = 0.99) {
  std::uniform_real_distribution<double> u(lo, hi);
  FrameScoreMatrix m;
  m.values.resize(frames, speakers);
  for (Eigen::Index i = 0; i < m.values.size(); ++i) m.values.data()[i] = u(rng);
  m.kind = ScoreKind::kProbability;
  m.space = Space::kMultilabel;
  m.num_speakers = speakers;
  return m;
}

/// Random rows on the powerset simplex (normalized exponentials).
inline FrameScoreMatrix random_power(Eigen::Index frames, int speakers, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  FrameScoreMatrix m;
  m.values.resize(frames, Eigen::Index{1} << speakers);
  for (Eigen::Index t = 0; t < frames; ++t) {
    for (Eigen::Index k = 0; k < m.values.cols(); ++k) m.values(t, k) = e(rng) + 1e-3;
    m.values.row(t) /= m.values.row(t).sum();
  }
  m.kind = ScoreKind::kProbability;
  m.space = Space::kPowerset;
  m.num_speakers = speakers;
  return m;
}

inline FrameScoreMatrix mult_probs(const Matrix& values) {
  FrameScoreMatrix m;
  m.values = values;
  m.num_speakers = static_cast<int>(values.cols());
  return m;
}

inline std::vector<TrainingRecording> to_training(const SyntheticEnsemble& e) {
  std::vector<TrainingRecording> out;
  for (const auto& r : e.recordings) {
    TrainingRecording tr;
    tr.scores.recording_id = r.recording_id;
    tr.scores.system_ids = e.system_ids;
    tr.scores.systems = r.system_logits;
    tr.reference = r.reference;
    out.push_back(std::move(tr));
  }
  return out;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "diacal") {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            (tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace diacal::testing
