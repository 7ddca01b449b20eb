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

#include "diacal/score_matrix.hpp"

namespace diacal {

inline constexpr int kDefaultUpsampleFactor = 10;
inline constexpr int kDefaultMedianWindow = 11;
inline constexpr double kDefaultThreshold = 0.5;

/// Repeats every frame `factor` times and multiplies the frame rate by `factor`.
FrameScoreMatrix upsample(const FrameScoreMatrix& m, int factor);
BinaryActivityMatrix upsample(const BinaryActivityMatrix& m, int factor);

/// Per-column sliding median over an odd `window`. The signal is extended by
/// mirroring it about its end points, edge sample included
/// (... x1 x0 | x0 x1 ... x_{T-1} | x_{T-1} x_{T-2} ...).
FrameScoreMatrix median_filter(const FrameScoreMatrix& m, int window);

/// 1 iff p > tau. Requires multilabel probabilities.
BinaryActivityMatrix threshold_decisions(const FrameScoreMatrix& m,
                                         double tau = kDefaultThreshold);

/// Arg-max powerset class per frame (lowest index on ties), decoded to speakers.
BinaryActivityMatrix powerset_decision(const FrameScoreMatrix& m);

}  // namespace diacal
