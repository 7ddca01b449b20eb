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

#include "diacal/calibration.hpp"

#include <string>

#include "diacal/error.hpp"
#include "diacal/spaces.hpp"
#include "fingerprint.hpp"

namespace diacal {
namespace {

// Regression data for one calibrator and the matching target matrix.
struct Problem {
  Matrix features;
  Matrix targets;
  Link link;
};

Problem joint_problem(const CalibrationTrainingSet& set) {
  if (set.space == Space::kMultilabel) {
    return {set.features, set.multilabel_targets, Link::kElementwiseSigmoid};
  }
  return {set.features, one_hot(set.class_targets, space_dimension(Space::kPowerset, set.num_speakers)),
          Link::kSoftmax};
}

LinearModel as_linear(const CalibrationModel& model) {
  if (model.strategy != CalibrationStrategy::kIndependentMult) return {model.scale, model.bias};
  return {Matrix(model.scale.col(0).asDiagonal()), model.bias};
}

}  // namespace

std::string_view to_string(CalibrationStrategy strategy) {
  switch (strategy) {
    case CalibrationStrategy::kIndependentMult: return "independent_mult";
    case CalibrationStrategy::kJointMult: return "joint_mult";
    case CalibrationStrategy::kJointPower: return "joint_power";
  }
  return "?";
}

std::string_view to_string(CalibrationFeature feature) {
  return feature == CalibrationFeature::kLog ? "log" : "logit";
}

CalibrationStrategy parse_calibration_strategy(std::string_view text) {
  if (text == "independent_mult") return CalibrationStrategy::kIndependentMult;
  if (text == "joint_mult") return CalibrationStrategy::kJointMult;
  if (text == "joint_power") return CalibrationStrategy::kJointPower;
  throw ParseError("unknown calibration strategy '" + std::string(text) + "'");
}

CalibrationFeature parse_calibration_feature(std::string_view text) {
  if (text == "log") return CalibrationFeature::kLog;
  if (text == "logit") return CalibrationFeature::kLogit;
  throw ParseError("unknown calibration feature '" + std::string(text) + "'");
}

Space calibration_space(CalibrationStrategy strategy) {
  return strategy == CalibrationStrategy::kJointPower ? Space::kPowerset : Space::kMultilabel;
}

void CalibrationModel::validate() const {
  if (space != calibration_space(strategy)) {
    throw ContractError("calibration strategy " + std::string(to_string(strategy)) +
                        " cannot live in " + std::string(to_string(space)) + " space");
  }
  const Eigen::Index d = dims();
  const Eigen::Index cols = strategy == CalibrationStrategy::kIndependentMult ? 1 : d;
  if (scale.rows() != d || scale.cols() != cols || bias.size() != d) {
    throw ContractError("calibration parameters do not match " + std::to_string(d) + " outputs");
  }
  check_epsilon(epsilon);
}

CalibrationModel CalibrationModel::identity_power(int num_speakers, double epsilon) {
  CalibrationModel m;
  m.strategy = CalibrationStrategy::kJointPower;
  m.space = Space::kPowerset;
  m.num_speakers = num_speakers;
  const int k = space_dimension(Space::kPowerset, num_speakers);
  m.scale = Matrix::Identity(k, k);
  m.bias = Vector::Zero(k);
  m.epsilon = epsilon;
  m.trained_on = "identity";
  return m;
}

void CalibrationTrainingSet::validate() const {
  if (features.rows() == 0) throw ContractError("empty calibration training set");
  if (features.cols() != space_dimension(space, num_speakers)) {
    throw ContractError("calibration features do not match the declared space");
  }
  if (multilabel_targets.rows() != features.rows() || multilabel_targets.cols() != num_speakers) {
    throw ContractError("calibration targets do not match the features");
  }
  if (space == Space::kPowerset && class_targets.size() != features.rows()) {
    throw ContractError("powerset class targets missing");
  }
  if (weights && weights->size() != features.rows()) {
    throw ContractError("calibration weights do not match the features");
  }
}

Matrix calibration_features(const FrameScoreMatrix& probs, CalibrationFeature feature,
                            double epsilon) {
  if (probs.kind != ScoreKind::kProbability) throw ContractError("calibration expects probabilities");
  if (probs.space == Space::kMultilabel && feature == CalibrationFeature::kLogit) {
    return safe_logit(probs.values, epsilon);
  }
  return safe_log(probs.values, epsilon);
}

CalibrationTrainingSet build_training_set(std::span<const LabeledScores> recordings, Space space,
                                          CalibrationFeature feature, double epsilon) {
  check_epsilon(epsilon);
  if (recordings.empty()) throw ContractError("empty calibration training set");
  CalibrationTrainingSet set;
  set.space = space;
  set.num_speakers = recordings.front().probs.num_speakers;
  set.feature = feature;
  set.epsilon = epsilon;

  Eigen::Index total = 0;
  for (const auto& r : recordings) {
    if (r.probs.num_speakers != set.num_speakers) {
      throw ContractError("recordings disagree on the number of speakers");
    }
    if (r.targets.rows() != r.probs.frames() || r.targets.cols() != set.num_speakers) {
      throw ContractError("targets of recording '" + r.probs.recording_id +
                          "' do not match its scores");
    }
    total += r.probs.frames();
  }
  const int d = space_dimension(space, set.num_speakers);
  set.features.resize(total, d);
  set.multilabel_targets.resize(total, set.num_speakers);
  if (space == Space::kPowerset) set.class_targets.resize(total);

  Eigen::Index row = 0;
  for (const auto& r : recordings) {
    const FrameScoreMatrix probs = to_space(to_probabilities(r.probs), space);
    const Eigen::Index n = probs.frames();
    set.features.middleRows(row, n) = calibration_features(probs, feature, epsilon);
    set.multilabel_targets.middleRows(row, n) = r.targets;
    if (space == Space::kPowerset) {
      const PowersetEncoding enc(set.num_speakers);
      for (Eigen::Index t = 0; t < n; ++t) {
        set.class_targets(row + t) = enc.class_of(r.targets.row(t));
      }
    }
    row += n;
  }
  set.validate();
  return set;
}

CalibrationModel fit_calibration(const CalibrationTrainingSet& train, CalibrationStrategy strategy,
                                 const CalibrationFitOptions& options,
                                 CalibrationFitReport* report) {
  train.validate();
  if (train.space != calibration_space(strategy)) {
    throw ContractError("training set space " + std::string(to_string(train.space)) +
                        " does not match strategy " + std::string(to_string(strategy)));
  }
  const Vector* weights = train.weights ? &*train.weights : nullptr;
  RegressionOptions reg;
  reg.l2_c = options.l2_c;
  reg.max_iter = options.max_iter;

  CalibrationModel model;
  model.strategy = strategy;
  model.space = train.space;
  model.num_speakers = train.num_speakers;
  model.feature = train.feature;
  model.epsilon = train.epsilon;

  detail::Fingerprint fp;
  fp.add(train.features);
  fp.add(train.multilabel_targets);
  if (weights) fp.add(*weights);
  model.trained_on = fp.hex();

  CalibrationFitReport local;
  if (strategy == CalibrationStrategy::kIndependentMult) {
    const int s_count = train.num_speakers;
    model.scale.resize(s_count, 1);
    model.bias.resize(s_count);
    local.converged = true;
    for (int s = 0; s < s_count; ++s) {
      const Matrix x = train.features.col(s);
      const Matrix y = train.multilabel_targets.col(s);
      const RegressionResult r = minimize_regularized_cross_entropy(
          {x, y, Link::kElementwiseSigmoid, weights}, reg);
      model.scale(s, 0) = r.model.weights(0, 0);
      model.bias(s) = r.model.bias(0);
      local.objective += r.objective;
      local.cross_entropy += r.cross_entropy;
      local.iterations += r.iterations;
      local.converged = local.converged && r.converged;
    }
  } else {
    const Problem p = joint_problem(train);
    const RegressionData data{p.features, p.targets, p.link, weights};
    std::optional<LinearModel> start;
    if (strategy == CalibrationStrategy::kJointPower) {
      const Eigen::Index k = p.features.cols();
      start = LinearModel{Matrix::Identity(k, k), Vector::Zero(k)};
    }
    const RegressionResult r = minimize_regularized_cross_entropy(data, reg, start);
    model.scale = r.model.weights;
    model.bias = r.model.bias;
    local.objective = r.objective;
    local.cross_entropy = r.cross_entropy;
    local.iterations = r.iterations;
    local.converged = r.converged;
    if (strategy == CalibrationStrategy::kJointPower) {
      const double identity_ce = mean_cross_entropy(data, *start);
      if (identity_ce < r.cross_entropy) {
        model.scale = start->weights;
        model.bias = start->bias;
        local.cross_entropy = identity_ce;
        local.objective = regression_objective(data, options.l2_c, *start);
        local.kept_identity = true;
      }
    }
  }
  if (report) *report = local;
  return model;
}

FrameScoreMatrix apply_calibration(const CalibrationModel& model, const FrameScoreMatrix& m) {
  model.validate();
  const FrameScoreMatrix probs = to_probabilities(m);
  if (probs.space != model.space) {
    throw ContractError("calibrator for " + std::string(to_string(model.space)) +
                        " space applied to " + std::string(to_string(probs.space)) + " scores");
  }
  if (probs.num_speakers != model.num_speakers) {
    throw ContractError("calibrator speaker count does not match the scores");
  }
  const Matrix features = calibration_features(probs, model.feature, model.epsilon);
  const Matrix z = as_linear(model).scores(features);
  return probs.with_values(apply_link(z, model.space), ScoreKind::kProbability, model.space);
}

double calibration_cross_entropy(const CalibrationModel& model, const CalibrationTrainingSet& set) {
  model.validate();
  set.validate();
  if (set.space != model.space) throw ContractError("calibrator and training set spaces differ");
  const Problem p = joint_problem(set);
  const Vector* weights = set.weights ? &*set.weights : nullptr;
  return mean_cross_entropy({p.features, p.targets, p.link, weights}, as_linear(model));
}

}  // namespace diacal
