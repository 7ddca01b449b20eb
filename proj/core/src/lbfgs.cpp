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

#include "diacal/lbfgs.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <vector>

#include "diacal/error.hpp"

namespace diacal {
namespace {

constexpr double kArmijo = 1e-4;
constexpr double kCurvature = 0.9;

struct Trial {
  double alpha = 0.0;
  double value = 0.0;
  double slope = 0.0;  // directional derivative at alpha
  Vector x;
  Vector grad;
};

class LineSearch {
 public:
  LineSearch(const ObjectiveFunction& f, const Vector& x, double f0, double slope0,
             const Vector& direction, int max_steps)
      : f_(f), x_(x), f0_(f0), slope0_(slope0), d_(direction), max_steps_(max_steps) {}

  // Returns false when no acceptable step was found.
  bool run(double alpha_init, Trial& out) {
    Trial prev{0.0, f0_, slope0_, {}, {}};
    double alpha = alpha_init;
    for (int i = 0; i < max_steps_; ++i) {
      Trial cur = evaluate(alpha);
      if (!std::isfinite(cur.value)) {
        // Step left the domain of finite values; retreat toward the last point.
        alpha = 0.5 * (prev.alpha + alpha);
        continue;
      }
      if (cur.value > f0_ + kArmijo * alpha * slope0_ || (i > 0 && cur.value >= prev.value)) {
        return zoom(prev, cur, out);
      }
      if (std::abs(cur.slope) <= -kCurvature * slope0_) {
        out = std::move(cur);
        return true;
      }
      if (cur.slope >= 0.0) return zoom(cur, prev, out);
      prev = std::move(cur);
      alpha *= 2.0;
    }
    return false;
  }

 private:
  Trial evaluate(double alpha) {
    Trial t;
    t.alpha = alpha;
    t.x = x_ + alpha * d_;
    t.grad.resize(x_.size());
    t.value = f_(t.x, t.grad);
    t.slope = t.grad.dot(d_);
    if (std::isfinite(t.value)) saw_finite_ = true;
    return t;
  }

  bool sufficient(const Trial& t) const {
    return std::isfinite(t.value) && t.value <= f0_ + kArmijo * t.alpha * slope0_;
  }

  bool zoom(Trial lo, Trial hi, Trial& out) {
    for (int i = 0; i < max_steps_; ++i) {
      const double width = hi.alpha - lo.alpha;
      double alpha = 0.5 * (lo.alpha + hi.alpha);
      // Safeguarded quadratic interpolation from (lo value, lo slope, hi value).
      if (std::isfinite(hi.value)) {
        const double denom = 2.0 * (hi.value - lo.value - lo.slope * width);
        if (denom > 0.0) {
          const double q = lo.alpha - lo.slope * width * width / denom;
          const double a = std::min(lo.alpha, hi.alpha);
          const double b = std::max(lo.alpha, hi.alpha);
          const double margin = 0.1 * (b - a);
          if (q > a + margin && q < b - margin) alpha = q;
        }
      }
      Trial cur = evaluate(alpha);
      if (!std::isfinite(cur.value) || cur.value > f0_ + kArmijo * alpha * slope0_ ||
          cur.value >= lo.value) {
        hi = std::move(cur);
      } else {
        if (std::abs(cur.slope) <= -kCurvature * slope0_) {
          out = std::move(cur);
          return true;
        }
        if (cur.slope * (hi.alpha - lo.alpha) >= 0.0) hi = lo;
        lo = std::move(cur);
      }
      if (std::abs(hi.alpha - lo.alpha) < 1e-16 * std::max(1.0, std::abs(lo.alpha))) break;
    }
    // Accept the best point satisfying sufficient decrease, if any.
    if (lo.alpha > 0.0 && sufficient(lo)) {
      out = std::move(lo);
      return true;
    }
    return false;
  }

  const ObjectiveFunction& f_;
  const Vector& x_;
  double f0_;
  double slope0_;
  const Vector& d_;
  int max_steps_;
  bool saw_finite_ = false;

 public:
  bool saw_finite() const { return saw_finite_; }
};

}  // namespace

LbfgsResult minimize_lbfgs(const ObjectiveFunction& f, Vector x0, const LbfgsOptions& options) {
  LbfgsResult result;
  result.x = std::move(x0);
  result.gradient.resize(result.x.size());
  result.value = f(result.x, result.gradient);
  if (!std::isfinite(result.value) || !result.gradient.allFinite()) {
    throw OptimizationError("non-finite objective", 0);
  }

  std::deque<Vector> s_hist;
  std::deque<Vector> y_hist;
  std::deque<double> rho_hist;

  for (int iter = 0; iter < options.max_iterations; ++iter) {
    result.iterations = iter;
    if (result.gradient.size() == 0 ||
        result.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance) {
      result.converged = true;
      return result;
    }

    // Two-loop recursion.
    Vector q = result.gradient;
    const std::size_t m = s_hist.size();
    std::vector<double> a(m);
    for (std::size_t i = m; i-- > 0;) {
      a[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= a[i] * y_hist[i];
    }
    if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    for (std::size_t i = 0; i < m; ++i) {
      const double b = rho_hist[i] * y_hist[i].dot(q);
      q += (a[i] - b) * s_hist[i];
    }
    Vector direction = -q;
    double slope = result.gradient.dot(direction);
    if (!(slope < 0.0)) {
      // Lost descent; restart from steepest descent.
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      direction = -result.gradient;
      slope = -result.gradient.squaredNorm();
    }
    const double alpha0 = m == 0 ? std::min(1.0, 1.0 / result.gradient.lpNorm<Eigen::Infinity>()) : 1.0;

    LineSearch search(f, result.x, result.value, slope, direction, options.max_line_search_steps);
    Trial step;
    if (!search.run(alpha0, step)) {
      if (!search.saw_finite()) {
        throw OptimizationError("line search found no finite objective", iter + 1);
      }
      // No further progress possible at machine precision.
      result.iterations = iter + 1;
      return result;
    }
    if (!step.grad.allFinite()) throw OptimizationError("non-finite gradient", iter + 1);

    Vector s = step.x - result.x;
    Vector y = step.grad - result.gradient;
    const double sy = s.dot(y);
    const double previous = result.value;
    result.x = std::move(step.x);
    result.gradient = std::move(step.grad);
    result.value = step.value;
    if (sy > 1e-12 * y.squaredNorm()) {
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(y));
      rho_hist.push_back(1.0 / sy);
      if (static_cast<int>(s_hist.size()) > options.history) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
    }
    const double scale = std::max({std::abs(previous), std::abs(result.value), 1.0});
    if ((previous - result.value) <= options.relative_function_tolerance * scale) {
      result.iterations = iter + 1;
      result.converged =
          result.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
      return result;
    }
  }
  result.iterations = options.max_iterations;
  result.converged = result.gradient.lpNorm<Eigen::Infinity>() < options.gradient_tolerance;
  return result;
}

}  // namespace diacal
