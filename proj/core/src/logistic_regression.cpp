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

#include "diacal/logistic_regression.hpp"

#include <cmath>
#include <string>

#include "diacal/error.hpp"

namespace diacal {
namespace {

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

void check_data(const RegressionData& data) {
  if (data.features.rows() != data.targets.rows()) {
    throw ContractError("feature and target row counts differ");
  }
  if (data.features.rows() == 0) throw ContractError("empty regression problem");
  if (!data.features.allFinite()) throw ContractError("non-finite regression features");
  if (data.row_weights && data.row_weights->size() != data.features.rows()) {
    throw ContractError("row weight count differs from row count");
  }
}

double total_weight(const RegressionData& data) {
  return data.row_weights ? data.row_weights->sum() : static_cast<double>(data.features.rows());
}

// Per-row cross-entropy and (optionally) dLoss/dZ for every row.
Vector row_losses(const RegressionData& data, const Matrix& z, Matrix* dz) {
  const Eigen::Index n = z.rows();
  const Eigen::Index d = z.cols();
  Vector loss(n);
  if (dz) dz->resize(n, d);
  if (data.link == Link::kElementwiseSigmoid) {
    for (Eigen::Index r = 0; r < n; ++r) {
      double acc = 0.0;
      for (Eigen::Index c = 0; c < d; ++c) {
        const double v = z(r, c);
        const double y = data.targets(r, c);
        acc += softplus(v) - y * v;
        if (dz) (*dz)(r, c) = sigmoid(v) - y;
      }
      loss(r) = acc;
    }
  } else {
    for (Eigen::Index r = 0; r < n; ++r) {
      const double mx = z.row(r).maxCoeff();
      const double lse = mx + std::log((z.row(r).array() - mx).exp().sum());
      const double mass = data.targets.row(r).sum();
      loss(r) = lse * mass - data.targets.row(r).dot(z.row(r));
      if (dz) {
        dz->row(r) = ((z.row(r).array() - lse).exp() * mass).matrix() - data.targets.row(r);
      }
    }
  }
  return loss;
}

Vector pack(const LinearModel& m) {
  Vector x(m.weights.size() + m.bias.size());
  x.head(m.weights.size()) = Eigen::Map<const Vector>(m.weights.data(), m.weights.size());
  x.tail(m.bias.size()) = m.bias;
  return x;
}

LinearModel unpack(const Vector& x, Eigen::Index d, Eigen::Index f) {
  LinearModel m;
  m.weights = Eigen::Map<const Matrix>(x.data(), d, f);
  m.bias = x.tail(d);
  return m;
}

}  // namespace

Matrix LinearModel::scores(const Matrix& features) const {
  if (features.cols() != weights.cols()) {
    throw ContractError("feature count " + std::to_string(features.cols()) +
                        " does not match model input size " + std::to_string(weights.cols()));
  }
  Matrix z = features * weights.transpose();
  z.rowwise() += bias.transpose();
  return z;
}

double regression_objective(const RegressionData& data, double l2_c, const LinearModel& model,
                            Matrix* grad_weights, Vector* grad_bias) {
  check_data(data);
  if (!(l2_c > 0.0)) throw ArgumentError("l2_c must be positive");
  const Matrix z = model.scores(data.features);
  if (z.cols() != data.targets.cols()) throw ContractError("target width does not match model");
  const bool want_grad = grad_weights || grad_bias;
  Matrix dz;
  Vector loss = row_losses(data, z, want_grad ? &dz : nullptr);
  const double wsum = total_weight(data);
  if (!(wsum > 0.0)) throw ContractError("row weights sum to zero");
  const double ce = (data.row_weights ? loss.dot(*data.row_weights) : loss.sum()) / wsum;
  const double penalty_scale = 1.0 / (l2_c * wsum);
  const double objective = ce + 0.5 * penalty_scale * model.weights.squaredNorm();
  if (want_grad) {
    if (data.row_weights) {
      dz = data.row_weights->asDiagonal() * dz;
    }
    dz /= wsum;
    if (grad_weights) {
      *grad_weights = dz.transpose() * data.features + penalty_scale * model.weights;
    }
    if (grad_bias) *grad_bias = dz.colwise().sum().transpose();
  }
  return objective;
}

double mean_cross_entropy(const RegressionData& data, const LinearModel& model) {
  check_data(data);
  const Matrix z = model.scores(data.features);
  if (z.cols() != data.targets.cols()) throw ContractError("target width does not match model");
  const Vector loss = row_losses(data, z, nullptr);
  const double wsum = total_weight(data);
  return (data.row_weights ? loss.dot(*data.row_weights) : loss.sum()) / wsum;
}

RegressionResult minimize_regularized_cross_entropy(const RegressionData& data,
                                                    const RegressionOptions& options,
                                                    const std::optional<LinearModel>& initial) {
  check_data(data);
  if (options.max_iter < 1) throw ArgumentError("max_iter must be >= 1");
  const Eigen::Index d = data.targets.cols();
  const Eigen::Index f = data.features.cols();

  LinearModel start;
  if (initial) {
    if (initial->weights.rows() != d || initial->weights.cols() != f || initial->bias.size() != d) {
      throw ContractError("initial parameters have the wrong shape");
    }
    start = *initial;
  } else {
    start.weights = Matrix::Zero(d, f);
    start.bias = Vector::Zero(d);
  }

  const ObjectiveFunction objective = [&](const Vector& x, Vector& grad) {
    const LinearModel m = unpack(x, d, f);
    Matrix gw;
    Vector gb;
    const double value = regression_objective(data, options.l2_c, m, &gw, &gb);
    grad.head(gw.size()) = Eigen::Map<const Vector>(gw.data(), gw.size());
    grad.tail(d) = gb;
    return value;
  };

  LbfgsOptions lbfgs;
  lbfgs.max_iterations = options.max_iter;
  lbfgs.gradient_tolerance = options.gradient_tolerance;
  const LbfgsResult solved = minimize_lbfgs(objective, pack(start), lbfgs);

  RegressionResult out;
  out.model = unpack(solved.x, d, f);
  out.objective = solved.value;
  out.cross_entropy = mean_cross_entropy(data, out.model);
  out.iterations = solved.iterations;
  out.converged = solved.converged;
  return out;
}

Matrix one_hot(const Eigen::VectorXi& classes, int num_classes) {
  Matrix y = Matrix::Zero(classes.size(), num_classes);
  for (Eigen::Index r = 0; r < classes.size(); ++r) {
    if (classes(r) < 0 || classes(r) >= num_classes) {
      throw ContractError("class index " + std::to_string(classes(r)) + " out of range");
    }
    y(r, classes(r)) = 1.0;
  }
  return y;
}

}  // namespace diacal
