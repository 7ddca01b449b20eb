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

#include "diacal/score_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "diacal/error.hpp"

namespace diacal {

std::string_view to_string(ScoreKind kind) {
  return kind == ScoreKind::kProbability ? "probability" : "logit";
}

std::string_view to_string(Space space) {
  return space == Space::kMultilabel ? "multilabel" : "powerset";
}

ScoreKind parse_score_kind(std::string_view text) {
  if (text == "probability" || text == "prob") return ScoreKind::kProbability;
  if (text == "logit") return ScoreKind::kLogit;
  throw ParseError("unknown score kind '" + std::string(text) + "'");
}

Space parse_space(std::string_view text) {
  if (text == "multilabel" || text == "mult") return Space::kMultilabel;
  if (text == "powerset" || text == "power") return Space::kPowerset;
  throw ParseError("unknown probability space '" + std::string(text) + "'");
}

int space_dimension(Space space, int num_speakers) {
  if (num_speakers < 1) throw ArgumentError("num_speakers must be >= 1");
  if (space == Space::kMultilabel) return num_speakers;
  if (num_speakers > 30) throw CapabilityError("powerset space too large");
  return 1 << num_speakers;
}

void FrameScoreMatrix::validate(double simplex_tolerance) const {
  if (num_speakers < 1) throw ContractError("score matrix needs at least one speaker");
  if (!(frame_rate_hz > 0.0)) throw ContractError("frame rate must be positive");
  if (dims() != space_dimension(space, num_speakers)) {
    throw ContractError("score matrix has " + std::to_string(dims()) + " columns, expected " +
                        std::to_string(space_dimension(space, num_speakers)) + " for " +
                        std::string(to_string(space)) + " space");
  }
  if (!values.allFinite()) throw ContractError("score matrix contains non-finite values");
  if (kind != ScoreKind::kProbability) return;
  if (values.size() > 0 && (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0)) {
    throw ContractError("probability outside [0, 1] in recording '" + recording_id + "'");
  }
  if (space == Space::kPowerset) {
    for (Eigen::Index t = 0; t < frames(); ++t) {
      if (std::abs(values.row(t).sum() - 1.0) > simplex_tolerance) {
        throw ContractError("powerset row " + std::to_string(t) + " does not sum to 1");
      }
    }
  }
}

FrameScoreMatrix FrameScoreMatrix::with_values(Matrix new_values, ScoreKind new_kind,
                                               Space new_space) const {
  FrameScoreMatrix out;
  out.values = std::move(new_values);
  out.kind = new_kind;
  out.space = new_space;
  out.num_speakers = num_speakers;
  out.frame_rate_hz = frame_rate_hz;
  out.recording_id = recording_id;
  return out;
}

void BinaryActivityMatrix::validate() const {
  if (!(frame_rate_hz > 0.0)) throw ContractError("frame rate must be positive");
  if (values.size() > 0 && values.maxCoeff() > 1) {
    throw ContractError("activity entries must be 0 or 1");
  }
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Matrix sigmoid(const Matrix& z) {
  return z.unaryExpr([](double v) { return sigmoid(v); });
}

Vector softmax(const Vector& z) {
  if (z.size() == 0) return z;
  Vector e = (z.array() - z.maxCoeff()).exp().matrix();
  return e / e.sum();
}

Matrix softmax_rows(const Matrix& z) {
  Matrix out(z.rows(), z.cols());
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    out.row(r) = softmax(z.row(r).transpose()).transpose();
  }
  return out;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 0.5)) {
    throw ArgumentError("epsilon must lie in (0, 0.5), got " + std::to_string(epsilon));
  }
}

double clamp_probability(double p, double epsilon) {
  return std::clamp(p, epsilon, 1.0 - epsilon);
}

Matrix safe_log(const Matrix& p, double epsilon) {
  check_epsilon(epsilon);
  return p.unaryExpr([epsilon](double v) { return std::log(clamp_probability(v, epsilon)); });
}

Matrix safe_logit(const Matrix& p, double epsilon) {
  check_epsilon(epsilon);
  return p.unaryExpr([epsilon](double v) {
    const double c = clamp_probability(v, epsilon);
    return std::log(c) - std::log1p(-c);
  });
}

}  // namespace diacal
