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
#include <string_view>

#include <Eigen/Dense>

namespace diacal {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ActivityValues = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Clamp applied before every log / logit of a probability.
inline constexpr double kDefaultEpsilon = 1e-7;
/// Score rate of the diarization models (100 ms frames).
inline constexpr double kDefaultFrameRateHz = 10.0;
/// Row-sum tolerance accepted for powerset rows that came from outside.
inline constexpr double kSimplexTolerance = 1e-6;

enum class ScoreKind { kProbability, kLogit };
enum class Space { kMultilabel, kPowerset };

std::string_view to_string(ScoreKind kind);
std::string_view to_string(Space space);
/// Accepts the long names ("probability", "multilabel") and the short
/// score-file forms ("prob", "mult", "power").
ScoreKind parse_score_kind(std::string_view text);
Space parse_space(std::string_view text);

/// Number of columns a matrix over `num_speakers` speakers has in `space`.
int space_dimension(Space space, int num_speakers);

/// Per-frame scores of one system on one recording. Rows are frames.
struct FrameScoreMatrix {
  Matrix values;
  ScoreKind kind = ScoreKind::kProbability;
  Space space = Space::kMultilabel;
  int num_speakers = 1;
  double frame_rate_hz = kDefaultFrameRateHz;
  std::string recording_id;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index dims() const { return values.cols(); }

  /// Throws ContractError if the shape or value invariants of the declared
  /// kind/space do not hold. Probability rows in powerset space must sum to 1
  /// within `simplex_tolerance`.
  void validate(double simplex_tolerance = 1e-9) const;

  /// Copy with the same metadata but different values/kind/space.
  FrameScoreMatrix with_values(Matrix new_values, ScoreKind new_kind, Space new_space) const;
};

/// Hard speaker decisions; rows are frames, entries are 0 or 1.
struct BinaryActivityMatrix {
  ActivityValues values;
  double frame_rate_hz = kDefaultFrameRateHz;
  std::string recording_id;

  Eigen::Index frames() const { return values.rows(); }
  Eigen::Index speakers() const { return values.cols(); }
  void validate() const;
};

double sigmoid(double z);
Matrix sigmoid(const Matrix& z);

/// Max-subtracted softmax.
Vector softmax(const Vector& z);
/// Softmax applied to each row independently.
Matrix softmax_rows(const Matrix& z);

/// Throws ArgumentError unless 0 < epsilon < 0.5.
void check_epsilon(double epsilon);

double clamp_probability(double p, double epsilon);
/// log(clamp(p, eps, 1 - eps)) elementwise.
Matrix safe_log(const Matrix& p, double epsilon = kDefaultEpsilon);
/// log(p / (1 - p)) on the clamped range, elementwise.
Matrix safe_logit(const Matrix& p, double epsilon = kDefaultEpsilon);

}  // namespace diacal
