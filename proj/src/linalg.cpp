#include "stls/linalg.hpp"

#include "stls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

namespace stls {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kConvergedOffDiagonal = 1e-12;

// Rotation (c, s) that zeroes the off-diagonal of [[alpha, gamma], [gamma, beta]].
std::pair<double, double> jacobi_rotation(double alpha, double beta, double gamma) {
    const double zeta = (beta - alpha) / (2.0 * gamma);
    const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    return {c, c * t};
}

// Index permutation that sorts `values` descending; ties keep original order.
std::vector<Eigen::Index> descending_order(const Vector& values) {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(values.size()));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return values(a) > values(b); });
    return order;
}

// Replace the listed columns of U with unit vectors orthogonal to every
// other column. Used for exactly-zero singular values whose left vectors
// the Jacobi iteration leaves undefined.
void complete_basis(Matrix& U, const std::vector<Eigen::Index>& missing) {
    std::vector<bool> is_missing(static_cast<std::size_t>(U.cols()), false);
    for (auto c : missing) is_missing[static_cast<std::size_t>(c)] = true;

    Eigen::Index next_candidate = 0;
    for (auto col : missing) {
        bool placed = false;
        while (!placed && next_candidate < U.rows()) {
            Vector v = Vector::Unit(U.rows(), next_candidate++);
            for (int pass = 0; pass < 2; ++pass) {
                for (Eigen::Index j = 0; j < U.cols(); ++j) {
                    if (is_missing[static_cast<std::size_t>(j)]) continue;
                    v -= U.col(j).dot(v) * U.col(j);
                }
            }
            const double norm = v.norm();
            if (norm > 0.5) {
                U.col(col) = v / norm;
                is_missing[static_cast<std::size_t>(col)] = false;
                placed = true;
            }
        }
        if (!placed) throw NumericalError("svd: could not complete orthonormal basis");
    }
}

SvdResult svd_tall(const Matrix& A) {
    const Eigen::Index n = A.rows();
    const Eigen::Index m = A.cols();
    Matrix W = A;
    Matrix V = Matrix::Identity(m, m);

    // Columns below rounding level of A are treated as exactly zero; their
    // correlations with other columns are noise and never settle.
    const double tiny = kEps * kEps * A.squaredNorm() * static_cast<double>(m);
    const int max_sweeps = 100 * static_cast<int>(std::min(n, m));
    bool converged = (m == 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double max_off = 0.0;
        for (Eigen::Index i = 0; i + 1 < m; ++i) {
            for (Eigen::Index j = i + 1; j < m; ++j) {
                const double alpha = W.col(i).squaredNorm();
                const double beta = W.col(j).squaredNorm();
                if (alpha <= tiny || beta <= tiny) continue;
                const double gamma = W.col(i).dot(W.col(j));
                const double rel = std::abs(gamma) / std::sqrt(alpha * beta);
                max_off = std::max(max_off, rel);
                if (rel <= kEps) continue;

                const auto [c, s] = jacobi_rotation(alpha, beta, gamma);
                for (Eigen::Index r = 0; r < n; ++r) {
                    const double wi = W(r, i);
                    const double wj = W(r, j);
                    W(r, i) = c * wi - s * wj;
                    W(r, j) = s * wi + c * wj;
                }
                for (Eigen::Index r = 0; r < m; ++r) {
                    const double vi = V(r, i);
                    const double vj = V(r, j);
                    V(r, i) = c * vi - s * vj;
                    V(r, j) = s * vi + c * vj;
                }
            }
        }
        converged = max_off <= kConvergedOffDiagonal;
    }
    if (!converged) {
        throw NumericalError("svd: Jacobi sweeps did not converge within " +
                             std::to_string(max_sweeps) + " sweeps");
    }

    Vector norms(m);
    for (Eigen::Index k = 0; k < m; ++k) norms(k) = W.col(k).norm();
    const auto order = descending_order(norms);

    SvdResult out;
    out.U.resize(n, m);
    out.S.resize(m);
    out.V.resize(m, m);
    std::vector<Eigen::Index> zero_columns;
    for (Eigen::Index k = 0; k < m; ++k) {
        const Eigen::Index src = order[static_cast<std::size_t>(k)];
        const double s = norms(src);
        out.S(k) = s;
        out.V.col(k) = V.col(src);
        if (s * s <= tiny || s <= std::numeric_limits<double>::min()) {
            out.S(k) = 0.0;
            out.U.col(k).setZero();
            zero_columns.push_back(k);
        } else {
            out.U.col(k) = W.col(src) / s;
        }
    }
    if (!zero_columns.empty()) complete_basis(out.U, zero_columns);

    for (Eigen::Index k = 0; k < m; ++k) {
        Eigen::Index arg = 0;
        out.U.col(k).cwiseAbs().maxCoeff(&arg);
        if (out.U(arg, k) < 0.0) {
            out.U.col(k) *= -1.0;
            out.V.col(k) *= -1.0;
        }
    }
    return out;
}

} // namespace

void require_finite(const Matrix& A, const char* what) {
    if (A.rows() < 1 || A.cols() < 1) {
        throw ContractError(std::string(what) + ": empty matrix");
    }
    if (!A.allFinite()) {
        throw ContractError(std::string(what) + ": non-finite entry");
    }
}

SvdResult svd(const Matrix& A) {
    require_finite(A, "svd");
    if (A.rows() >= A.cols()) return svd_tall(A);

    // Wide input: factor the transpose and swap the roles of U and V, then
    // re-apply the sign convention on the new U.
    SvdResult t = svd_tall(A.transpose());
    SvdResult out{std::move(t.V), std::move(t.S), std::move(t.U)};
    for (Eigen::Index k = 0; k < out.U.cols(); ++k) {
        Eigen::Index arg = 0;
        out.U.col(k).cwiseAbs().maxCoeff(&arg);
        if (out.U(arg, k) < 0.0) {
            out.U.col(k) *= -1.0;
            out.V.col(k) *= -1.0;
        }
    }
    return out;
}

Vector singular_values(const Matrix& A) { return svd(A).S; }

SymEig sym_eig(const Matrix& A) {
    require_finite(A, "sym_eig");
    if (A.rows() != A.cols()) throw ContractError("sym_eig: matrix is not square");
    const double scale = A.norm();
    if ((A - A.transpose()).norm() > 1e-12 * std::max(scale, std::numeric_limits<double>::min())) {
        throw ContractError("sym_eig: matrix is not symmetric");
    }

    const Eigen::Index n = A.rows();
    Matrix M = 0.5 * (A + A.transpose());
    Matrix V = Matrix::Identity(n, n);

    const int max_sweeps = 100 * static_cast<int>(n);
    bool converged = false;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off = 0.0;
        for (Eigen::Index p = 0; p < n; ++p)
            for (Eigen::Index q = p + 1; q < n; ++q) off += 2.0 * M(p, q) * M(p, q);
        if (off == 0.0 || std::sqrt(off) <= kEps * 1e-3 * scale) {
            converged = true;
            break;
        }
        for (Eigen::Index p = 0; p + 1 < n; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = M(p, q);
                if (apq == 0.0) continue;
                if (std::abs(apq) <= kEps * 1e-3 * std::sqrt(std::abs(M(p, p) * M(q, q)))) {
                    M(p, q) = M(q, p) = 0.0;
                    continue;
                }
                const auto [c, s] = jacobi_rotation(M(p, p), M(q, q), apq);
                // M <- J^T M J with J the (p, q) rotation [[c, s], [-s, c]].
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double mkp = M(k, p);
                    const double mkq = M(k, q);
                    M(k, p) = c * mkp - s * mkq;
                    M(k, q) = s * mkp + c * mkq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double mpk = M(p, k);
                    const double mqk = M(q, k);
                    M(p, k) = c * mpk - s * mqk;
                    M(q, k) = s * mpk + c * mqk;
                }
                M(p, q) = M(q, p) = 0.0;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) throw NumericalError("sym_eig: Jacobi sweeps did not converge");

    const Vector diag = M.diagonal();
    const auto order = descending_order(diag);
    SymEig out{Vector(n), Matrix(n, n)};
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = diag(order[static_cast<std::size_t>(k)]);
        out.vectors.col(k) = V.col(order[static_cast<std::size_t>(k)]);
    }
    return out;
}

Vector sym_eigvals(const Matrix& A) { return sym_eig(A).values; }

ProcrustesResult orthogonal_procrustes(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows() || A.cols() != B.cols()) {
        throw ContractError("orthogonal_procrustes: A and B must have the same shape");
    }
    require_finite(A, "orthogonal_procrustes");
    require_finite(B, "orthogonal_procrustes");
    if (A == B) {
        // Exact minimizer; the SVD route would leave rounding in Q and loss.
        const Eigen::Index p = A.cols();
        return {Matrix::Identity(p, p), 0.0};
    }
    const SvdResult f = svd(B.transpose() * A);
    ProcrustesResult out;
    out.Q = f.U * f.V.transpose();
    out.loss = (A - B * out.Q).squaredNorm();
    return out;
}

double nuclear_norm(const Matrix& A) { return svd(A).S.sum(); }

double frobenius_norm(const Matrix& A) { return A.norm(); }

Conditioning condition_number(const Matrix& A) {
    if (A.rows() < A.cols()) throw ContractError("condition_number: requires rows >= cols");
    const Vector s = singular_values(A);
    const double top = s(0);
    const double bottom = s(s.size() - 1);
    if (top == 0.0 || bottom <= 1e-12 * top) {
        return {std::numeric_limits<double>::infinity(), true};
    }
    return {top / bottom, false};
}

Matrix hcat(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows()) throw ContractError("hcat: row counts differ");
    Matrix out(A.rows(), A.cols() + B.cols());
    out << A, B;
    return out;
}

} // namespace stls
