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

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "diacal/logistic_regression.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

enum class CalibrationStrategy {
  kIndependentMult,  // p_i = sigmoid(alpha_i * f(p_i) + beta_i)
  kJointMult,        // p = sigmoid(A f(p) + b), A is S x S
  kJointPower,       // p = softmax(W f(p) + b), W is K x K
};

/// Input transform f(p) of the calibrator. kLog is log(p) as in the classic
/// formulation; kLogit uses log-odds for multilabel inputs (for powerset
/// inputs both are the clamped log-probability).
enum class CalibrationFeature { kLog, kLogit };

std::string_view to_string(CalibrationStrategy strategy);
std::string_view to_string(CalibrationFeature feature);
CalibrationStrategy parse_calibration_strategy(std::string_view text);
CalibrationFeature parse_calibration_feature(std::string_view text);
Space calibration_space(CalibrationStrategy strategy);

/// Fitted Platt-scaling parameters. For kIndependentMult `scale` is an S x 1
/// column holding the per-speaker slopes; for the joint strategies it is the
/// full D x D matrix.
struct CalibrationModel {
  CalibrationStrategy strategy = CalibrationStrategy::kJointPower;
  Space space = Space::kPowerset;
  int num_speakers = 1;
  CalibrationFeature feature = CalibrationFeature::kLog;
  Matrix scale;
  Vector bias;
  double epsilon = kDefaultEpsilon;
  std::string trained_on;

  int dims() const { return space_dimension(space, num_speakers); }
  /// Throws ContractError on inconsistent dimensions.
  void validate() const;

  /// The identity-equivalent joint_power model (W = I, b = 0).
  static CalibrationModel identity_power(int num_speakers, double epsilon = kDefaultEpsilon);
};

/// Pooled frames for fitting one calibrator.
struct CalibrationTrainingSet {
  Space space = Space::kPowerset;
  int num_speakers = 1;
  CalibrationFeature feature = CalibrationFeature::kLog;
  double epsilon = kDefaultEpsilon;
  Matrix features;            // N x D, f(p)
  Matrix multilabel_targets;  // N x S binary (always filled)
  Eigen::VectorXi class_targets;  // N powerset class indices (powerset space only)
  std::optional<Vector> weights;

  Eigen::Index size() const { return features.rows(); }
  void validate() const;
};

/// Feature matrix f(p) for probabilities in either space.
Matrix calibration_features(const FrameScoreMatrix& probs, CalibrationFeature feature,
                            double epsilon);

/// One (scores, aligned targets) pair per recording.
struct LabeledScores {
  FrameScoreMatrix probs;
  Matrix targets;  // T x S, 0/1 per speaker, columns aligned to probs' speakers
};

/// Converts every recording to `space`, computes features, and pools all
/// frames with equal weight.
CalibrationTrainingSet build_training_set(std::span<const LabeledScores> recordings, Space space,
                                          CalibrationFeature feature = CalibrationFeature::kLog,
                                          double epsilon = kDefaultEpsilon);

struct CalibrationFitOptions {
  double l2_c = 1.0;
  int max_iter = 1000;
};

struct CalibrationFitReport {
  double objective = 0.0;
  double cross_entropy = 0.0;
  int iterations = 0;
  bool converged = false;
  bool kept_identity = false;
};

/// Fits one calibrator. joint_power starts from the identity and falls back to
/// it if the fitted model has higher training cross-entropy.
CalibrationModel fit_calibration(const CalibrationTrainingSet& train, CalibrationStrategy strategy,
                                 const CalibrationFitOptions& options = {},
                                 CalibrationFitReport* report = nullptr);

/// p_cal = link(scale * f(p) + bias). Logit inputs are converted first.
FrameScoreMatrix apply_calibration(const CalibrationModel& model, const FrameScoreMatrix& m);

/// Mean cross-entropy of the calibrator on its own training-set layout
/// (summed over outputs for multilabel, per frame for powerset).
double calibration_cross_entropy(const CalibrationModel& model, const CalibrationTrainingSet& set);

}  // namespace diacal
