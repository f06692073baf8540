#pragma once

#include <Eigen/Dense>

#include <utility>

namespace stls {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Reduced SVD A = U * diag(S) * V^T with k = min(rows, cols).
///
/// S is sorted descending (ties keep the original column order). Each column
/// of U is sign-normalized so that its largest-magnitude entry is positive;
/// the matching column of V is flipped with it.
struct SvdResult {
    Matrix U; // n x k, orthonormal columns
    Vector S; // k, descending, >= 0
    Matrix V; // m x k, orthonormal columns
};

/// One-sided (Hestenes) Jacobi SVD. Throws NumericalError when the sweep cap
/// of 100*min(n, m) is exhausted, ContractError on empty or non-finite input.
SvdResult svd(const Matrix& A);

/// Singular values only, descending.
Vector singular_values(const Matrix& A);

struct SymEig {
    Vector values;  // descending
    Matrix vectors; // column i pairs with values(i)
};

/// Cyclic Jacobi eigensolver for symmetric matrices. Input must be symmetric
/// to 1e-12 relative (Frobenius) or a ContractError is thrown.
SymEig sym_eig(const Matrix& A);
Vector sym_eigvals(const Matrix& A);

struct ProcrustesResult {
    Matrix Q;    // p x p orthogonal (reflections allowed)
    double loss; // ||A - B Q||_F^2
};

/// argmin over O(p) of ||A - B Q||_F^2, solved from the SVD of B^T A.
ProcrustesResult orthogonal_procrustes(const Matrix& A, const Matrix& B);

double nuclear_norm(const Matrix& A);
double frobenius_norm(const Matrix& A);

struct Conditioning {
    double kappa;        // sigma_1 / sigma_p, +inf when rank deficient
    bool rank_deficient; // sigma_p <= 1e-12 * sigma_1
};

/// Condition number of a tall (n >= p) matrix.
Conditioning condition_number(const Matrix& A);

/// Horizontal concatenation [A | B].
Matrix hcat(const Matrix& A, const Matrix& B);

/// Throws ContractError unless every entry is finite.
void require_finite(const Matrix& A, const char* what);

} // namespace stls
