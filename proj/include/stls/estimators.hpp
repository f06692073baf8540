#pragma once

#include "stls/linalg.hpp"
#include "stls/permutation.hpp"
#include "stls/tls.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stls {

/// LAP cost used in the ALTA permutation step.
///   C1: d(Y2_i, (X_hat R_hat) row fitted to Y1_j)
///   C2: d(X_hat_i, Y1_j)
///   C3: C1 + C2
///   C4: min_x ||Y2_i - R_hat^T x||^2 + ||Y1_j - x||^2
enum class CostKind { C1, C2, C3, C4 };

std::string_view to_string(CostKind kind);
/// Accepts "c1".."c4" (any case); throws ContractError otherwise.
CostKind parse_cost_kind(std::string_view text);

struct EstimateResult {
    Permutation perm;                   // estimate of pi_star
    std::size_t iterations = 0;
    std::vector<double> objective_trace; // criterion value per iteration
    bool converged = false;
    std::optional<std::string> failure;
    double objective = 0.0;     // selection criterion at perm
    double tls_objective = 0.0; // TLS objective at perm (NaN when n < 2p)
};

struct IterationLimits {
    std::size_t max_iter = 50;
    double tol = 1e-10; // relative change of the criterion that counts as stalled
};

/// Exhaustive minimizer of the TLS objective over all n! permutations.
/// Throws ContractError when n > limit.
EstimateResult brute_force_tls(const Matrix& Y1, const Matrix& Y2, std::size_t limit = 9);

/// LAP cost matrix for one ALTA permutation step. `fit` must come from
/// tls_fit(Y2, current.apply(Y1)). Rows index observations of Y2 and columns
/// index rows of Y1, so the optimal assignment is directly the next
/// permutation estimate. For C1 the fitted row k belongs to Y1 row
/// current[k], which is where its column lands.
Matrix build_cost(CostKind kind, const TlsFit& fit, const Permutation& current,
                  const Matrix& Y1, const Matrix& Y2);

/// Alternating LAP / TLS. Returns the iterate with the smallest TLS
/// objective seen, not necessarily the last one.
EstimateResult alta(const Matrix& Y1, const Matrix& Y2, const Permutation& init,
                    CostKind kind, const IterationLimits& limits = {});

/// Alternating LAP / OLS baseline that treats Y1 as the noiseless design.
/// Selection criterion is the OLS residual ||Y2 - pi(Y1) R_hat||_F^2.
EstimateResult aloa(const Matrix& Y1, const Matrix& Y2, const Permutation& init,
                    const IterationLimits& limits = {});

} // namespace stls
