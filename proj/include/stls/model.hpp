#pragma once

#include "stls/linalg.hpp"
#include "stls/permutation.hpp"
#include "stls/rng.hpp"

#include <cstddef>

namespace stls {

/// Ground truth for one synthetic experiment:
///   Y1 = X + E1,  Y2 = pi_star(X) * R + E2,
/// with E1, E2 independent and rows i.i.d. N(0, Sigma).
struct ProblemInstance {
    Matrix X;             // n x p latent design
    Matrix R;             // p x p coefficient matrix
    Permutation pi_star;  // true row correspondence
    Matrix Sigma;         // p x p noise covariance

    [[nodiscard]] std::size_t n() const { return static_cast<std::size_t>(X.rows()); }
    [[nodiscard]] std::size_t p() const { return static_cast<std::size_t>(X.cols()); }
};

struct Observations {
    Matrix Y1;
    Matrix Y2;
};

/// Design with condition number 1: draw X0 with i.i.d. N(0, I_p) rows, take
/// the left singular factor U of X0 and return sqrt(n p) * U / ||U||_F.
Matrix generate_design(std::size_t n, std::size_t p, Rng& rng);

/// [[cos t, -sin t], [sin t, cos t]].
Matrix rotation_2d(double theta);

/// Haar-distributed orthogonal p x p matrix (QR of a Gaussian matrix with the
/// sign of R's diagonal folded into Q).
Matrix random_orthogonal(std::size_t p, Rng& rng);

/// n x p matrix with independent N(0, Sigma) rows, via the symmetric
/// eigen-factor of Sigma (works for singular Sigma). Throws ContractError
/// when Sigma is not symmetric positive semidefinite.
Matrix sample_noise(std::size_t n, const Matrix& Sigma, Rng& rng);

/// Fresh E1 (drawn first) and E2 (drawn second) from the same stream.
Observations generate_observations(const ProblemInstance& inst, Rng& rng);

/// Fisher-Yates shuffle of indices 0..k-1; indices k..n-1 stay fixed.
Permutation partial_shuffle(std::size_t n, std::size_t k, Rng& rng);

inline Permutation random_permutation(std::size_t n, Rng& rng) {
    return partial_shuffle(n, n, rng);
}

struct Normalized {
    Matrix Y1_new; // orthonormal columns, Y1 * V * diag(S)^-1
    Matrix V;
    Vector S;
};

/// Maps Y1 onto its left singular factor so the result has condition
/// number 1. Throws ContractError when sigma_p(Y1) <= 1e-10 * sigma_1(Y1).
Normalized normalize_condition(const Matrix& Y1);

/// ||X||_F^2 / (n tr(Sigma)); +inf when tr(Sigma) == 0.
double snr(const Matrix& X, const Matrix& Sigma);

/// Checks symmetric PSD (lambda_min >= -1e-12 * max(1, lambda_max)).
void require_covariance(const Matrix& Sigma, std::size_t p);

} // namespace stls
