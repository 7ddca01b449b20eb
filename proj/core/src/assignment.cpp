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

#include "diacal/assignment.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "diacal/error.hpp"

namespace diacal {

std::vector<int> hungarian_min_cost(const Matrix& cost) {
  const int rows = static_cast<int>(cost.rows());
  const int cols = static_cast<int>(cost.cols());
  if (rows == 0) return {};
  if (!cost.allFinite()) throw ArgumentError("assignment costs must be finite");
  const int n = std::max(rows, cols);
  const auto at = [&](int r, int c) { return r < rows && c < cols ? cost(r, c) : 0.0; };

  // 1-based potentials; match[j] is the row assigned to column j.
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(rows, -1);
  for (int j = 1; j <= n; ++j) {
    const int r = match[j] - 1;
    if (r >= 0 && r < rows && j - 1 < cols) assignment[r] = j - 1;
  }
  return assignment;
}

Permutation identity_permutation(int n) {
  Permutation p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  return p;
}

Permutation best_column_permutation(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw ArgumentError("permutation search needs a square cost");
  const int n = static_cast<int>(cost.rows());
  if (n > kExhaustivePermutationLimit) return hungarian_min_cost(cost);

  Permutation p = identity_permutation(n);
  Permutation best = p;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += cost(i, p[i]);
    // next_permutation walks in lexicographic order, so strict < keeps the
    // smallest minimizer.
    if (total < best_cost) {
      best_cost = total;
      best = p;
    }
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

Matrix permute_columns(const Matrix& m, const Permutation& perm) {
  if (static_cast<Eigen::Index>(perm.size()) != m.cols()) {
    throw ArgumentError("permutation size does not match column count");
  }
  Matrix out(m.rows(), m.cols());
  for (std::size_t i = 0; i < perm.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = m.col(perm[i]);
  return out;
}

}  // namespace diacal
