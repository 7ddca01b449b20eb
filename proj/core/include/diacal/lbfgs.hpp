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

#include <functional>

#include "diacal/score_matrix.hpp"

namespace diacal {

struct LbfgsOptions {
  int max_iterations = 1000;
  int history = 10;
  /// Converged when the gradient infinity-norm drops below this.
  double gradient_tolerance = 1e-6;
  /// Stop when the relative objective decrease of an iteration falls below this.
  double relative_function_tolerance = 1e-13;
  int max_line_search_steps = 40;
};

struct LbfgsResult {
  Vector x;
  double value = 0.0;
  Vector gradient;
  int iterations = 0;
  bool converged = false;
};

/// Returns f(x) and writes the gradient into `grad` (already sized).
using ObjectiveFunction = std::function<double(const Vector& x, Vector& grad)>;

/// Limited-memory BFGS with a strong-Wolfe line search (c1 = 1e-4, c2 = 0.9).
/// Throws OptimizationError if the objective is non-finite at the start or no
/// finite trial point can be found along a search direction.
LbfgsResult minimize_lbfgs(const ObjectiveFunction& f, Vector x0, const LbfgsOptions& options = {});

}  // namespace diacal
