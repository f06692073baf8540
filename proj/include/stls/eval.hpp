#pragma once

#include "stls/linalg.hpp"
#include "stls/permutation.hpp"
#include "stls/rng.hpp"

#include <cstddef>

namespace stls {

/// (1 / ||X||_F^2) min_{Q in O(p)} ||pi_star(X) - pi_hat(X) Q||_F^2, in [0, 4].
double procrustes_loss(const Matrix& X, const Permutation& pi_star, const Permutation& pi_hat);

/// (1 / (n p)) ||pi_hat(X) - pi_star(X)||_F^2.
double quadratic_loss(const Matrix& X, const Permutation& pi_star, const Permutation& pi_hat);

/// Number of positions where the two permutations disagree.
std::size_t hamming(const Permutation& pi_hat, const Permutation& pi_star);

struct BoundInputs {
    Matrix X;
    Matrix R;
    Matrix Sigma;
    double eta = 1.0;
    double c = 1.0 / 32.0;
};

struct BoundValue {
    double bound = 0.0;
    double a_n = 0.0;
    double snr = 0.0;
    double probability_statement = 0.0;  // 1 - n^(-eta^2)
    double probability_derivation = 0.0; // 1 - 2p n^(-eta^2)
    bool noiseless = false;              // lambda_1(Sigma) == 0: bound 0, a_n unset
};

/// High-probability upper bound on the normalized Procrustes loss of the
/// exact TLS estimator:
///
///   2p / (s_p^2 ||X||_F^2) (1 + eta a_n) lambda_1(Sigma)
///     * [16 s_1 ||X||_F sqrt(2n) + 2n],
///   a_n = sqrt(tr(Sigma) / lambda_1(Sigma) * ln(n) / (c n)),
///
/// with s_1 = max(1, sigma_1(R)) and s_p = min(1, sigma_p(R)). Probabilities
/// are raw (not clipped).
BoundValue loss_bound(const BoundInputs& in);

struct LemmaSides {
    double lhs;
    double rhs;
};

/// lhs = min_Q ||X - pi(X) Q||_F^2, rhs = 2 * (sum of the p smallest squared
/// singular values of [X | pi(X)]). Requires |kappa(X) - 1| <= 1e-6.
LemmaSides procrustes_gap(const Matrix& X, const Permutation& pi);

struct MaxUvSides {
    double lhs;         // best sampled feasible value
    double rhs;         // ||X^T pi(X)||_*
    double constructed; // value at (U_A, V_A) / sqrt(2) from the SVD of X^T pi(X)
};

/// Compares max 2 tr(U^T X^T pi(X) V) over U^T U + V^T V = I with the
/// orthogonal maximum of tr(X^T pi(X) Q), which is the nuclear norm.
/// The sampled side draws `samples` pairs Q1 / sqrt(2), Q2 / sqrt(2), then
/// runs `samples` accept-if-better perturbations of the best pair (ascent
/// direction plus Gaussian noise),
/// each projected back onto the constraint.
MaxUvSides trace_max_check(const Matrix& X, const Permutation& pi, Rng& rng, std::size_t samples = 5000);

/// 2 tr(U^T A V), the objective maximized in trace_max_check.
double maxuv_objective(const Matrix& A, const Matrix& U, const Matrix& V);

struct TailBound {
    double raw;
    [[nodiscard]] double clipped() const { return raw < 1.0 ? raw : 1.0; }
};

/// 2p exp(-c n eps^2 lambda_1(Sigma) / ||Sigma||_*) for 0 < eps <= 4n.
TailBound eig_tail_rhs(const Matrix& Sigma, std::size_t n, double eps, double c = 1.0 / 32.0);

struct TailFrequency {
    std::size_t draws = 0;
    std::size_t exceed_sum = 0;   // lambda_1(E2^T E2) + lambda_1(E1^T E1) >= threshold
    std::size_t exceed_joint = 0; // lambda_1([E2 | E1]^T [E2 | E1]) >= threshold
    double threshold = 0.0;       // 2 n lambda_1(Sigma) (1 + eps)
    [[nodiscard]] double frequency_sum() const { return draws ? double(exceed_sum) / double(draws) : 0.0; }
    [[nodiscard]] double frequency_joint() const { return draws ? double(exceed_joint) / double(draws) : 0.0; }
};

/// Monte-Carlo exceedance frequency of the noise Gram eigenvalue event.
TailFrequency eig_tail_empirical(const Matrix& Sigma, std::size_t n, double eps, std::size_t draws, Rng& rng);

} // namespace stls
