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

#include "diacal/post_processing.hpp"

#include <algorithm>
#include <string>
#include <vector>

#include "diacal/error.hpp"
#include "diacal/spaces.hpp"

namespace diacal {
namespace {

void check_factor(int factor) {
  if (factor < 1) throw ArgumentError("upsample factor must be >= 1, got " + std::to_string(factor));
}

template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> repeat_rows(
    const Eigen::MatrixBase<Derived>& in, int factor) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(in.rows() * factor,
                                                                               in.cols());
  for (Eigen::Index t = 0; t < in.rows(); ++t) {
    for (int r = 0; r < factor; ++r) out.row(t * factor + r) = in.row(t);
  }
  return out;
}

// Maps any integer position onto [0, n) by mirror extension with period 2n.
Eigen::Index reflect_index(Eigen::Index i, Eigen::Index n) {
  const Eigen::Index period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace

FrameScoreMatrix upsample(const FrameScoreMatrix& m, int factor) {
  check_factor(factor);
  FrameScoreMatrix out = m.with_values(repeat_rows(m.values, factor), m.kind, m.space);
  out.frame_rate_hz = m.frame_rate_hz * factor;
  return out;
}

BinaryActivityMatrix upsample(const BinaryActivityMatrix& m, int factor) {
  check_factor(factor);
  BinaryActivityMatrix out;
  out.values = repeat_rows(m.values, factor);
  out.frame_rate_hz = m.frame_rate_hz * factor;
  out.recording_id = m.recording_id;
  return out;
}

FrameScoreMatrix median_filter(const FrameScoreMatrix& m, int window) {
  if (window < 1 || window % 2 == 0) {
    throw ArgumentError("median window must be a positive odd integer, got " +
                        std::to_string(window));
  }
  if (m.kind != ScoreKind::kProbability) {
    throw ContractError("median filtering expects probabilities");
  }
  if (window == 1 || m.frames() == 0) return m;

  const Eigen::Index n = m.frames();
  const Eigen::Index half = window / 2;
  Matrix out(n, m.dims());
  std::vector<double> buf(static_cast<std::size_t>(window));
  for (Eigen::Index c = 0; c < m.dims(); ++c) {
    for (Eigen::Index t = 0; t < n; ++t) {
      for (Eigen::Index k = -half; k <= half; ++k) {
        buf[static_cast<std::size_t>(k + half)] = m.values(reflect_index(t + k, n), c);
      }
      auto mid = buf.begin() + half;
      std::nth_element(buf.begin(), mid, buf.end());
      out(t, c) = *mid;
    }
  }
  return m.with_values(std::move(out), m.kind, m.space);
}

BinaryActivityMatrix threshold_decisions(const FrameScoreMatrix& m, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) throw ArgumentError("threshold must lie in (0, 1)");
  if (m.kind != ScoreKind::kProbability || m.space != Space::kMultilabel) {
    throw ContractError("thresholding expects multilabel probabilities");
  }
  BinaryActivityMatrix out;
  out.values = (m.values.array() > tau).cast<std::uint8_t>().matrix();
  out.frame_rate_hz = m.frame_rate_hz;
  out.recording_id = m.recording_id;
  return out;
}

BinaryActivityMatrix powerset_decision(const FrameScoreMatrix& m) {
  if (m.kind != ScoreKind::kProbability || m.space != Space::kPowerset) {
    throw ContractError("powerset decision expects powerset probabilities");
  }
  m.validate(kSimplexTolerance);
  const PowersetEncoding enc(m.num_speakers);
  BinaryActivityMatrix out;
  out.values = ActivityValues::Zero(m.frames(), m.num_speakers);
  out.frame_rate_hz = m.frame_rate_hz;
  out.recording_id = m.recording_id;
  for (Eigen::Index t = 0; t < m.frames(); ++t) {
    Eigen::Index best = 0;
    // Strict comparison keeps the lowest index on ties.
    for (Eigen::Index k = 1; k < m.dims(); ++k) {
      if (m.values(t, k) > m.values(t, best)) best = k;
    }
    for (int s = 0; s < m.num_speakers; ++s) {
      out.values(t, s) = enc.contains(static_cast<int>(best), s) ? 1 : 0;
    }
  }
  return out;
}

}  // namespace diacal
