#pragma once

#include "stls/linalg.hpp"

namespace stls {

/// Rank-p total least squares fit of [Y2 | Y1p].
struct TlsFit {
    Matrix X_hat;     // n x p, denoised design in Y2's row order
    Matrix R_hat;     // p x p
    double objective; // sum of the p smallest squared singular values
};

/// Sum of the p smallest squared singular values of the n x 2p matrix
/// [Y2 | Y1p]. Requires both n x p with n >= 2p.
double tls_objective(const Matrix& Y2, const Matrix& Y1p);

/// Eckart-Young truncation of [Y2 | Y1p] to rank p, split into
/// [Y2_hat | Y1_hat]; X_hat = Y1_hat and R_hat solves Y1_hat R = Y2_hat
/// (the normal-equation operator, evaluated by QR).
/// Throws DegenerateFitError when sigma_p(Y1_hat) <= 1e-10 sigma_1(Y1_hat).
TlsFit tls_fit(const Matrix& Y2, const Matrix& Y1p);

} // namespace stls
