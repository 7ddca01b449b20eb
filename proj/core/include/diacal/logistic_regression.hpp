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

#include "diacal/lbfgs.hpp"
#include "diacal/score_matrix.hpp"

namespace diacal {

/// Output link of a linear model: independent sigmoids or one softmax.
enum class Link { kElementwiseSigmoid, kSoftmax };

struct RegressionOptions {
  /// Inverse L2 strength, same convention as liblinear / scikit-learn: the
  /// penalty is ||W||_F^2 / (2 * l2_c * N) on top of the mean cross-entropy,
  /// i.e. 0.5 * ||W||^2 + l2_c * sum(loss) rescaled by 1 / (l2_c * N).
  double l2_c = 1.0;
  int max_iter = 1000;
  double gradient_tolerance = 1e-6;
};

/// Parameters of z = W x + b.
struct LinearModel {
  Matrix weights;  // D x F
  Vector bias;     // D

  Matrix scores(const Matrix& features) const;  // N x D
};

struct RegressionResult {
  LinearModel model;
  double objective = 0.0;      // mean cross-entropy + penalty
  double cross_entropy = 0.0;  // mean cross-entropy alone
  int iterations = 0;
  bool converged = false;
};

/// Rows of `targets` are indicator vectors: for the sigmoid link each column is
/// an independent binary target; for the softmax link each row is one-hot (or a
/// distribution). Cross-entropy is summed over outputs and averaged over rows.
struct RegressionData {
  const Matrix& features;  // N x F
  const Matrix& targets;   // N x D
  Link link;
  /// Optional non-negative per-row weights; the mean becomes a weighted mean.
  const Vector* row_weights = nullptr;
};

/// Objective value at (W, b). When `grad_weights`/`grad_bias` are non-null the
/// analytic gradient is written there.
double regression_objective(const RegressionData& data, double l2_c, const LinearModel& model,
                            Matrix* grad_weights = nullptr, Vector* grad_bias = nullptr);

double mean_cross_entropy(const RegressionData& data, const LinearModel& model);

/// Fits W, b by L-BFGS from `initial` (zeros when empty).
RegressionResult minimize_regularized_cross_entropy(const RegressionData& data,
                                                    const RegressionOptions& options = {},
                                                    const std::optional<LinearModel>& initial = {});

/// One-hot N x K matrix from class indices; throws ContractError if an index is out of range.
Matrix one_hot(const Eigen::VectorXi& classes, int num_classes);

}  // namespace diacal
