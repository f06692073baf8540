#pragma once

#include "stls/linalg.hpp"
#include "stls/permutation.hpp"

namespace stls {

struct Assignment {
    Permutation perm; // row i is assigned to column perm[i]
    double cost;      // sum_i C(i, perm[i])
};

/// Exact square linear assignment by shortest augmenting paths with
/// potentials (Hungarian / Jonker-Volgenant family), O(n^3).
Assignment solve_lap(const Matrix& C);

} // namespace stls
