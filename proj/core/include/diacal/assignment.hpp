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

/// Column permutation: column i of the aligned matrix is column perm[i] of the source.
using Permutation = std::vector<int>;

/// Largest size searched exhaustively by best_column_permutation.
inline constexpr int kExhaustivePermutationLimit = 6;

/// Minimum-cost assignment for a rectangular cost matrix (Kuhn-Munkres with
/// potentials, O(n^3)). Returns for every row the assigned column, or -1 when
/// there are more rows than columns and the row stays unassigned.
std::vector<int> hungarian_min_cost(const Matrix& cost);

/// Permutation p of {0..n-1} minimizing sum_i cost(i, p[i]) for a square cost
/// matrix. Exhaustive for n <= 6, keeping the lexicographically smallest
/// minimizer; Hungarian otherwise.
Permutation best_column_permutation(const Matrix& cost);

Permutation identity_permutation(int n);

/// Reorders the columns of `m` so that column i becomes m.col(perm[i]).
Matrix permute_columns(const Matrix& m, const Permutation& perm);

}  // namespace diacal
