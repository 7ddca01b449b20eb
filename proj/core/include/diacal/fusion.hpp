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

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "diacal/assignment.hpp"
#include "diacal/logistic_regression.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

enum class FusionMethod {
  kAverageProbs,
  kAverageLogits,
  kDynamicLogits,
  kEntropy,
  kMetaLearner,
  kNone,
};

std::string_view to_string(FusionMethod method);
FusionMethod parse_fusion_method(std::string_view text);

/// Aligned outputs of M systems on one recording.
struct FusionInput {
  std::vector<FrameScoreMatrix> systems;
  std::vector<std::string> system_ids;

  /// Shapes, spaces, speaker counts and frame rates must agree; M >= 1.
  void validate() const;
};

/// For each matrix in `others`, the speaker permutation minimizing the summed
/// squared difference to `anchor` (see best_column_permutation for the search
/// and tie rule). Inputs are multilabel probabilities or logits.
std::vector<Permutation> align_systems(const FrameScoreMatrix& anchor,
                                       std::span<const FrameScoreMatrix> others);

/// Relabels speakers: new speaker i is old speaker perm[i]. Works in both
/// spaces (powerset classes are remapped through their subsets).
FrameScoreMatrix permute_speakers(const FrameScoreMatrix& m, const Permutation& perm);

FrameScoreMatrix average_probs(const FusionInput& in);
FrameScoreMatrix average_logits(const FusionInput& in, double epsilon = kDefaultEpsilon);
/// Per-frame weights proportional to each system's summed |logit|.
FrameScoreMatrix dynamic_logits(const FusionInput& in, double epsilon = kDefaultEpsilon);
/// Per-frame weights proportional to max(0, H_max - H(p_m)).
FrameScoreMatrix entropy_fusion(const FusionInput& in);

/// Supervised fusion z = W [z_1; ...; z_M] + b.
struct MetaLearnerModel {
  Matrix weights;  // D x (M * D)
  Vector bias;     // D
  Space space = Space::kMultilabel;
  int num_speakers = 1;
  int m_systems = 0;
  std::vector<std::string> system_ids;
  double epsilon = kDefaultEpsilon;
  std::string trained_on;

  int dims() const { return space_dimension(space, num_speakers); }
  void validate() const;
};

/// Pooled frames for MetaLearner fitting; logits[m] is N x D for system m.
struct MetaLearnerTrainingSet {
  Space space = Space::kMultilabel;
  int num_speakers = 1;
  std::vector<std::string> system_ids;
  std::vector<Matrix> logits;
  Matrix multilabel_targets;  // N x S
  double epsilon = kDefaultEpsilon;  // clamp used to produce `logits`

  Eigen::Index size() const { return multilabel_targets.rows(); }
};

/// Concatenated features [z_1 ... z_M] (N x M*D).
Matrix concatenate_logits(std::span<const Matrix> logits);

MetaLearnerModel fit_metalearner(const MetaLearnerTrainingSet& train,
                                 const RegressionOptions& options = {},
                                 RegressionResult* report = nullptr);

/// Throws ContractError unless `in.system_ids` equals the model's order.
FrameScoreMatrix apply_metalearner(const MetaLearnerModel& model, const FusionInput& in);

/// Mean training cross-entropy in the regression's own layout.
double metalearner_cross_entropy(const MetaLearnerModel& model, const MetaLearnerTrainingSet& set);

/// Converts every system to `space` probabilities and applies `method`.
/// kNone returns the first system; kMetaLearner requires `meta`.
FrameScoreMatrix fuse(const FusionInput& in, FusionMethod method, Space space,
                      const MetaLearnerModel* meta = nullptr, double epsilon = kDefaultEpsilon);

}  // namespace diacal
