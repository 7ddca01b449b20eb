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

#include <vector>

#include "diacal/score_matrix.hpp"

namespace diacal {

/// Largest speaker count for which powerset matrices are materialized.
inline constexpr int kMaxPowersetSpeakers = 20;

/// Class index k <-> speaker subset {s : bit s of k is set}.
/// For two speakers the classes are [{}, {0}, {1}, {0,1}].
class PowersetEncoding {
 public:
  explicit PowersetEncoding(int num_speakers);

  int num_speakers() const { return num_speakers_; }
  int class_count() const { return 1 << num_speakers_; }

  bool contains(int class_index, int speaker) const { return (class_index >> speaker) & 1; }
  std::vector<int> speakers(int class_index) const;
  /// Class of an indicator row (speaker s active iff active[s] != 0).
  template <typename Row>
  int class_of(const Row& active) const {
    int k = 0;
    for (int s = 0; s < num_speakers_; ++s) {
      if (active(s) != 0) k |= 1 << s;
    }
    return k;
  }

 private:
  int num_speakers_;
};

/// Product distribution over speaker subsets assuming independent speakers.
FrameScoreMatrix mult_to_power(const FrameScoreMatrix& p);

/// Per-speaker marginals of a powerset distribution.
FrameScoreMatrix power_to_mult(const FrameScoreMatrix& p);

/// Converts probabilities to `target` space; identity when already there.
FrameScoreMatrix to_space(const FrameScoreMatrix& p, Space target);

/// Multilabel: clamped log-odds. Powerset: clamped log-probabilities, which
/// the softmax maps back to the (clamped, renormalized) input.
FrameScoreMatrix to_logits(const FrameScoreMatrix& m, double epsilon = kDefaultEpsilon);

/// Inverse link: sigmoid for multilabel, row softmax for powerset.
FrameScoreMatrix to_probabilities(const FrameScoreMatrix& m);

/// Applies the link appropriate to `space`.
Matrix apply_link(const Matrix& z, Space space);

}  // namespace diacal
