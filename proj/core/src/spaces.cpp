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

#include "diacal/spaces.hpp"

#include <string>

#include "diacal/error.hpp"

namespace diacal {
namespace {

void require_probabilities(const FrameScoreMatrix& m, Space space, const char* op) {
  if (m.kind != ScoreKind::kProbability || m.space != space) {
    throw ContractError(std::string(op) + " expects " + std::string(to_string(space)) +
                        " probabilities");
  }
}

}  // namespace

PowersetEncoding::PowersetEncoding(int num_speakers) : num_speakers_(num_speakers) {
  if (num_speakers < 1) throw ArgumentError("powerset needs at least one speaker");
  if (num_speakers > kMaxPowersetSpeakers) {
    throw CapabilityError("powerset over " + std::to_string(num_speakers) +
                          " speakers exceeds the supported maximum of " +
                          std::to_string(kMaxPowersetSpeakers));
  }
}

std::vector<int> PowersetEncoding::speakers(int class_index) const {
  std::vector<int> out;
  for (int s = 0; s < num_speakers_; ++s) {
    if (contains(class_index, s)) out.push_back(s);
  }
  return out;
}

FrameScoreMatrix mult_to_power(const FrameScoreMatrix& p) {
  require_probabilities(p, Space::kMultilabel, "mult_to_power");
  const PowersetEncoding enc(p.num_speakers);
  const int K = enc.class_count();
  Matrix out(p.frames(), K);
  for (Eigen::Index t = 0; t < p.frames(); ++t) {
    // Build the product distribution one speaker at a time: classes below 2^s
    // already hold the distribution over speakers 0..s-1.
    out(t, 0) = 1.0;
    for (int s = 0; s < p.num_speakers; ++s) {
      const double ps = p.values(t, s);
      const int half = 1 << s;
      for (int k = 0; k < half; ++k) {
        out(t, k + half) = out(t, k) * ps;
        out(t, k) *= 1.0 - ps;
      }
    }
  }
  return p.with_values(std::move(out), ScoreKind::kProbability, Space::kPowerset);
}

FrameScoreMatrix power_to_mult(const FrameScoreMatrix& p) {
  require_probabilities(p, Space::kPowerset, "power_to_mult");
  p.validate(kSimplexTolerance);
  const PowersetEncoding enc(p.num_speakers);
  Matrix out = Matrix::Zero(p.frames(), p.num_speakers);
  for (Eigen::Index t = 0; t < p.frames(); ++t) {
    for (int k = 0; k < enc.class_count(); ++k) {
      for (int s = 0; s < p.num_speakers; ++s) {
        if (enc.contains(k, s)) out(t, s) += p.values(t, k);
      }
    }
  }
  // Rows within tolerance of the simplex can marginalize a hair above 1.
  out = out.cwiseMin(1.0).cwiseMax(0.0);
  return p.with_values(std::move(out), ScoreKind::kProbability, Space::kMultilabel);
}

FrameScoreMatrix to_space(const FrameScoreMatrix& p, Space target) {
  if (p.kind != ScoreKind::kProbability) throw ContractError("to_space expects probabilities");
  if (p.space == target) return p;
  return target == Space::kPowerset ? mult_to_power(p) : power_to_mult(p);
}

FrameScoreMatrix to_logits(const FrameScoreMatrix& m, double epsilon) {
  if (m.kind == ScoreKind::kLogit) return m;
  Matrix z = m.space == Space::kMultilabel ? safe_logit(m.values, epsilon)
                                           : safe_log(m.values, epsilon);
  return m.with_values(std::move(z), ScoreKind::kLogit, m.space);
}

Matrix apply_link(const Matrix& z, Space space) {
  return space == Space::kMultilabel ? sigmoid(z) : softmax_rows(z);
}

FrameScoreMatrix to_probabilities(const FrameScoreMatrix& m) {
  if (m.kind == ScoreKind::kProbability) return m;
  return m.with_values(apply_link(m.values, m.space), ScoreKind::kProbability, m.space);
}

}  // namespace diacal
