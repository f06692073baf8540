#include "stls/model.hpp"

#include "stls/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stls {

Matrix generate_design(std::size_t n, std::size_t p, Rng& rng) {
    if (p < 1 || n < p) throw ContractError("generate_design: requires n >= p >= 1");
    const auto rows = static_cast<Eigen::Index>(n);
    const auto cols = static_cast<Eigen::Index>(p);
    for (int attempt = 0; attempt < 2; ++attempt) {
        const Matrix raw = rng.normal_matrix(rows, cols);
        if (condition_number(raw).rank_deficient) continue;
        const Matrix U = svd(raw).U;
        return std::sqrt(static_cast<double>(n * p)) * U / U.norm();
    }
    throw NumericalError("generate_design: sampled design was rank deficient twice");
}

Matrix rotation_2d(double theta) {
    Matrix R(2, 2);
    R << std::cos(theta), -std::sin(theta),
         std::sin(theta), std::cos(theta);
    return R;
}

Matrix random_orthogonal(std::size_t p, Rng& rng) {
    const auto dim = static_cast<Eigen::Index>(p);
    const Matrix G = rng.normal_matrix(dim, dim);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ() * Matrix::Identity(dim, dim);
    const Matrix Rfac = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < dim; ++j) {
        if (Rfac(j, j) < 0.0) Q.col(j) *= -1.0;
    }
    return Q;
}

void require_covariance(const Matrix& Sigma, std::size_t p) {
    if (static_cast<std::size_t>(Sigma.rows()) != p || static_cast<std::size_t>(Sigma.cols()) != p) {
        throw ContractError("covariance must be p x p");
    }
    const Vector lambda = sym_eigvals(Sigma);
    const double floor = -1e-12 * std::max(1.0, lambda(0));
    if (lambda(lambda.size() - 1) < floor) {
        throw ContractError("covariance is not positive semidefinite");
    }
}

Matrix sample_noise(std::size_t n, const Matrix& Sigma, Rng& rng) {
    require_finite(Sigma, "sample_noise");
    const auto p = static_cast<std::size_t>(Sigma.rows());
    require_covariance(Sigma, p);
    const SymEig eig = sym_eig(Sigma);
    // Sigma = L L^T with L = V sqrt(Lambda); rows are z^T L^T.
    const Matrix L = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
    const Matrix Z = rng.normal_matrix(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p));
    return Z * L.transpose();
}

Observations generate_observations(const ProblemInstance& inst, Rng& rng) {
    const std::size_t n = inst.n();
    const Matrix E1 = sample_noise(n, inst.Sigma, rng);
    const Matrix E2 = sample_noise(n, inst.Sigma, rng);
    return {inst.X + E1, inst.pi_star.apply(inst.X) * inst.R + E2};
}

Permutation partial_shuffle(std::size_t n, std::size_t k, Rng& rng) {
    if (k > n) throw ContractError("partial_shuffle: k must not exceed n");
    std::vector<std::size_t> map = Permutation::identity(n).map();
    for (std::size_t i = k; i > 1; --i) {
        const std::size_t j = rng.below(i);
        std::swap(map[i - 1], map[j]);
    }
    return Permutation(std::move(map));
}

Normalized normalize_condition(const Matrix& Y1) {
    if (Y1.rows() < Y1.cols()) throw ContractError("normalize_condition: requires n >= p");
    SvdResult f = svd(Y1);
    const double top = f.S(0);
    const double bottom = f.S(f.S.size() - 1);
    if (top == 0.0 || bottom <= 1e-10 * top) {
        throw ContractError("normalize_condition: Y1 is rank deficient");
    }
    return {std::move(f.U), std::move(f.V), std::move(f.S)};
}

double snr(const Matrix& X, const Matrix& Sigma) {
    if (Sigma.rows() != X.cols() || Sigma.cols() != X.cols()) {
        throw ContractError("snr: Sigma must be p x p");
    }
    const double trace = Sigma.trace();
    if (trace <= 0.0) return std::numeric_limits<double>::infinity();
    return X.squaredNorm() / (static_cast<double>(X.rows()) * trace);
}

} // namespace stls
