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

#include "diacal/fusion.hpp"

#include <cmath>

#include "diacal/error.hpp"
#include "diacal/spaces.hpp"
#include "fingerprint.hpp"

namespace diacal {
namespace {

std::vector<FrameScoreMatrix> as_probabilities(const FusionInput& in) {
  in.validate();
  std::vector<FrameScoreMatrix> out;
  out.reserve(in.systems.size());
  for (const auto& s : in.systems) {
    FrameScoreMatrix p = to_probabilities(s);
    p.validate(kSimplexTolerance);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<Matrix> as_logits(const std::vector<FrameScoreMatrix>& probs, double epsilon) {
  std::vector<Matrix> out;
  out.reserve(probs.size());
  for (const auto& p : probs) out.push_back(to_logits(p, epsilon).values);
  return out;
}

// Mixes per-system matrices row by row with per-frame weights (T x M).
Matrix weighted_rows(const std::vector<Matrix>& parts, const Matrix& weights) {
  Matrix out = Matrix::Zero(parts.front().rows(), parts.front().cols());
  for (std::size_t m = 0; m < parts.size(); ++m) {
    out += weights.col(static_cast<Eigen::Index>(m)).asDiagonal() * parts[m];
  }
  return out;
}

// Normalizes raw non-negative weights per row; all-zero rows get 1/M.
Matrix normalize_weights(Matrix raw) {
  const double equal = 1.0 / static_cast<double>(raw.cols());
  for (Eigen::Index t = 0; t < raw.rows(); ++t) {
    const double total = raw.row(t).sum();
    if (total > 0.0) {
      raw.row(t) /= total;
    } else {
      raw.row(t).setConstant(equal);
    }
  }
  return raw;
}

double entropy(const Eigen::Ref<const Eigen::RowVectorXd>& p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) h -= p(i) * std::log(p(i));
  }
  return h;
}

Matrix metalearner_targets(Space space, int num_speakers, const Matrix& multilabel) {
  if (space == Space::kMultilabel) return multilabel;
  const PowersetEncoding enc(num_speakers);
  Eigen::VectorXi classes(multilabel.rows());
  for (Eigen::Index t = 0; t < multilabel.rows(); ++t) classes(t) = enc.class_of(multilabel.row(t));
  return one_hot(classes, enc.class_count());
}

Link link_of(Space space) {
  return space == Space::kMultilabel ? Link::kElementwiseSigmoid : Link::kSoftmax;
}

}  // namespace

std::string_view to_string(FusionMethod method) {
  switch (method) {
    case FusionMethod::kAverageProbs: return "average_probs";
    case FusionMethod::kAverageLogits: return "average_logits";
    case FusionMethod::kDynamicLogits: return "dynamic_logits";
    case FusionMethod::kEntropy: return "entropy";
    case FusionMethod::kMetaLearner: return "metalearner";
    case FusionMethod::kNone: return "none";
  }
  return "?";
}

FusionMethod parse_fusion_method(std::string_view text) {
  for (auto m : {FusionMethod::kAverageProbs, FusionMethod::kAverageLogits,
                 FusionMethod::kDynamicLogits, FusionMethod::kEntropy, FusionMethod::kMetaLearner,
                 FusionMethod::kNone}) {
    if (text == to_string(m)) return m;
  }
  throw ParseError("unknown fusion method '" + std::string(text) + "'");
}

void FusionInput::validate() const {
  if (systems.empty()) throw ContractError("fusion needs at least one system");
  if (!system_ids.empty() && system_ids.size() != systems.size()) {
    throw ContractError("system id count does not match system count");
  }
  const FrameScoreMatrix& first = systems.front();
  for (const auto& s : systems) {
    if (s.frames() != first.frames() || s.dims() != first.dims() || s.space != first.space ||
        s.num_speakers != first.num_speakers || s.frame_rate_hz != first.frame_rate_hz) {
      throw ContractError("fusion inputs for recording '" + first.recording_id +
                          "' differ in shape, space or frame rate");
    }
  }
}

std::vector<Permutation> align_systems(const FrameScoreMatrix& anchor,
                                       std::span<const FrameScoreMatrix> others) {
  if (anchor.space != Space::kMultilabel) throw ContractError("alignment expects multilabel scores");
  const FrameScoreMatrix a = to_probabilities(anchor);
  std::vector<Permutation> perms;
  perms.reserve(others.size());
  for (const auto& other : others) {
    if (other.space != Space::kMultilabel || other.frames() != a.frames() ||
        other.dims() != a.dims()) {
      throw ContractError("cannot align systems of different shape");
    }
    const FrameScoreMatrix o = to_probabilities(other);
    const Eigen::Index s = a.dims();
    Matrix cost(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
      for (Eigen::Index j = 0; j < s; ++j) cost(i, j) = (a.values.col(i) - o.values.col(j)).squaredNorm();
    }
    perms.push_back(best_column_permutation(cost));
  }
  return perms;
}

FrameScoreMatrix permute_speakers(const FrameScoreMatrix& m, const Permutation& perm) {
  if (static_cast<int>(perm.size()) != m.num_speakers) {
    throw ArgumentError("permutation size does not match speaker count");
  }
  if (m.space == Space::kMultilabel) {
    return m.with_values(permute_columns(m.values, perm), m.kind, m.space);
  }
  const PowersetEncoding enc(m.num_speakers);
  Permutation classes(static_cast<std::size_t>(enc.class_count()));
  for (int k = 0; k < enc.class_count(); ++k) {
    int old = 0;
    for (int i = 0; i < m.num_speakers; ++i) {
      if (enc.contains(k, i)) old |= 1 << perm[i];
    }
    classes[k] = old;
  }
  return m.with_values(permute_columns(m.values, classes), m.kind, m.space);
}

FrameScoreMatrix average_probs(const FusionInput& in) {
  const auto probs = as_probabilities(in);
  Matrix sum = Matrix::Zero(probs.front().frames(), probs.front().dims());
  for (const auto& p : probs) sum += p.values;
  sum /= static_cast<double>(probs.size());
  return probs.front().with_values(std::move(sum), ScoreKind::kProbability, probs.front().space);
}

FrameScoreMatrix average_logits(const FusionInput& in, double epsilon) {
  const auto probs = as_probabilities(in);
  const auto logits = as_logits(probs, epsilon);
  Matrix sum = Matrix::Zero(logits.front().rows(), logits.front().cols());
  for (const auto& z : logits) sum += z;
  sum /= static_cast<double>(logits.size());
  const Space space = probs.front().space;
  return probs.front().with_values(apply_link(sum, space), ScoreKind::kProbability, space);
}

FrameScoreMatrix dynamic_logits(const FusionInput& in, double epsilon) {
  const auto probs = as_probabilities(in);
  const auto logits = as_logits(probs, epsilon);
  const Eigen::Index frames = probs.front().frames();
  Matrix raw(frames, static_cast<Eigen::Index>(logits.size()));
  for (std::size_t m = 0; m < logits.size(); ++m) {
    raw.col(static_cast<Eigen::Index>(m)) = logits[m].cwiseAbs().rowwise().sum();
  }
  const Matrix z = weighted_rows(logits, normalize_weights(std::move(raw)));
  const Space space = probs.front().space;
  return probs.front().with_values(apply_link(z, space), ScoreKind::kProbability, space);
}

FrameScoreMatrix entropy_fusion(const FusionInput& in) {
  const auto probs = as_probabilities(in);
  const FrameScoreMatrix& first = probs.front();
  const double h_max = std::log(static_cast<double>(first.dims()));
  Matrix raw(first.frames(), static_cast<Eigen::Index>(probs.size()));
  std::vector<Matrix> parts;
  parts.reserve(probs.size());
  for (std::size_t m = 0; m < probs.size(); ++m) {
    for (Eigen::Index t = 0; t < first.frames(); ++t) {
      // Multilabel entropy can exceed log S; such systems get zero weight.
      raw(t, static_cast<Eigen::Index>(m)) = std::max(0.0, h_max - entropy(probs[m].values.row(t)));
    }
    parts.push_back(probs[m].values);
  }
  Matrix fused = weighted_rows(parts, normalize_weights(std::move(raw)));
  return first.with_values(std::move(fused), ScoreKind::kProbability, first.space);
}

void MetaLearnerModel::validate() const {
  const Eigen::Index d = dims();
  if (m_systems < 1) throw ContractError("metalearner needs at least one system");
  if (weights.rows() != d || weights.cols() != d * m_systems || bias.size() != d) {
    throw ContractError("metalearner parameters do not match " + std::to_string(m_systems) +
                        " systems of dimension " + std::to_string(d));
  }
  if (!system_ids.empty() && static_cast<int>(system_ids.size()) != m_systems) {
    throw ContractError("metalearner system id count does not match m_systems");
  }
  check_epsilon(epsilon);
}

Matrix concatenate_logits(std::span<const Matrix> logits) {
  if (logits.empty()) throw ContractError("no logits to concatenate");
  const Eigen::Index n = logits.front().rows();
  const Eigen::Index d = logits.front().cols();
  Matrix out(n, d * static_cast<Eigen::Index>(logits.size()));
  for (std::size_t m = 0; m < logits.size(); ++m) {
    if (logits[m].rows() != n || logits[m].cols() != d) {
      throw ContractError("metalearner systems have mismatched frame counts");
    }
    out.middleCols(static_cast<Eigen::Index>(m) * d, d) = logits[m];
  }
  return out;
}

MetaLearnerModel fit_metalearner(const MetaLearnerTrainingSet& train,
                                 const RegressionOptions& options, RegressionResult* report) {
  if (train.logits.empty()) throw ContractError("metalearner needs at least one system");
  const Matrix features = concatenate_logits(train.logits);
  if (features.rows() != train.multilabel_targets.rows()) {
    throw ContractError("metalearner targets do not match the number of frames");
  }
  const int d = space_dimension(train.space, train.num_speakers);
  if (train.logits.front().cols() != d) throw ContractError("metalearner logits have the wrong width");
  const Matrix targets = metalearner_targets(train.space, train.num_speakers, train.multilabel_targets);
  const RegressionResult r =
      minimize_regularized_cross_entropy({features, targets, link_of(train.space)}, options);

  MetaLearnerModel model;
  model.weights = r.model.weights;
  model.bias = r.model.bias;
  model.space = train.space;
  model.num_speakers = train.num_speakers;
  model.m_systems = static_cast<int>(train.logits.size());
  model.system_ids = train.system_ids;
  model.epsilon = train.epsilon;
  detail::Fingerprint fp;
  fp.add(features);
  fp.add(train.multilabel_targets);
  model.trained_on = fp.hex();
  if (report) *report = r;
  return model;
}

FrameScoreMatrix apply_metalearner(const MetaLearnerModel& model, const FusionInput& in) {
  model.validate();
  in.validate();
  if (static_cast<int>(in.systems.size()) != model.m_systems) {
    throw ContractError("metalearner expects " + std::to_string(model.m_systems) + " systems");
  }
  if (!model.system_ids.empty() && in.system_ids != model.system_ids) {
    throw ContractError("system order does not match the metalearner's training order");
  }
  std::vector<FrameScoreMatrix> probs;
  for (const auto& s : in.systems) probs.push_back(to_space(to_probabilities(s), model.space));
  const auto logits = as_logits(probs, model.epsilon);
  const LinearModel linear{model.weights, model.bias};
  const Matrix z = linear.scores(concatenate_logits(logits));
  return probs.front().with_values(apply_link(z, model.space), ScoreKind::kProbability, model.space);
}

double metalearner_cross_entropy(const MetaLearnerModel& model, const MetaLearnerTrainingSet& set) {
  model.validate();
  const Matrix features = concatenate_logits(set.logits);
  const Matrix targets = metalearner_targets(set.space, set.num_speakers, set.multilabel_targets);
  return mean_cross_entropy({features, targets, link_of(model.space)},
                            LinearModel{model.weights, model.bias});
}

FrameScoreMatrix fuse(const FusionInput& in, FusionMethod method, Space space,
                      const MetaLearnerModel* meta, double epsilon) {
  in.validate();
  FusionInput converted;
  converted.system_ids = in.system_ids;
  for (const auto& s : in.systems) converted.systems.push_back(to_space(to_probabilities(s), space));
  switch (method) {
    case FusionMethod::kAverageProbs: return average_probs(converted);
    case FusionMethod::kAverageLogits: return average_logits(converted, epsilon);
    case FusionMethod::kDynamicLogits: return dynamic_logits(converted, epsilon);
    case FusionMethod::kEntropy: return entropy_fusion(converted);
    case FusionMethod::kMetaLearner:
      if (!meta) throw ContractError("metalearner fusion requires a fitted model");
      if (meta->space != space) throw ContractError("metalearner was fitted in a different space");
      return apply_metalearner(*meta, converted);
    case FusionMethod::kNone: return converted.systems.front();
  }
  throw ContractError("unhandled fusion method");
}

}  // namespace diacal
