#include "stls/eval.hpp"

#include "stls/errors.hpp"
#include "stls/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace stls {

namespace {

void check_perm(const Matrix& X, const Permutation& pi, const char* what) {
    if (pi.size() != static_cast<std::size_t>(X.rows())) {
        throw ContractError(std::string(what) + ": permutation size does not match X");
    }
}

void require_unit_condition(const Matrix& X, const char* what) {
    const Conditioning k = condition_number(X);
    if (k.rank_deficient || std::abs(k.kappa - 1.0) > 1e-6) {
        throw ContractError(std::string(what) + ": requires condition number 1 (within 1e-6)");
    }
}

// Nearest matrix with orthonormal columns (polar factor).
Matrix orthonormalize(const Matrix& W) {
    const SvdResult f = svd(W);
    return f.U * f.V.transpose();
}

} // namespace

double procrustes_loss(const Matrix& X, const Permutation& pi_star, const Permutation& pi_hat) {
    check_perm(X, pi_star, "procrustes_loss");
    check_perm(X, pi_hat, "procrustes_loss");
    const double scale = X.squaredNorm();
    if (scale == 0.0) throw ContractError("procrustes_loss: X is zero");
    return orthogonal_procrustes(pi_star.apply(X), pi_hat.apply(X)).loss / scale;
}

double quadratic_loss(const Matrix& X, const Permutation& pi_star, const Permutation& pi_hat) {
    check_perm(X, pi_star, "quadratic_loss");
    check_perm(X, pi_hat, "quadratic_loss");
    return (pi_hat.apply(X) - pi_star.apply(X)).squaredNorm() / static_cast<double>(X.size());
}

std::size_t hamming(const Permutation& pi_hat, const Permutation& pi_star) {
    if (pi_hat.size() != pi_star.size()) throw ContractError("hamming: permutation sizes differ");
    std::size_t count = 0;
    for (std::size_t i = 0; i < pi_hat.size(); ++i) count += pi_hat[i] != pi_star[i] ? 1 : 0;
    return count;
}

BoundValue loss_bound(const BoundInputs& in) {
    require_finite(in.X, "loss_bound");
    const auto n = static_cast<double>(in.X.rows());
    const auto p = static_cast<double>(in.X.cols());
    const auto pdim = static_cast<std::size_t>(in.X.cols());
    if (in.R.rows() != in.X.cols() || in.R.cols() != in.X.cols()) {
        throw ContractError("loss_bound: R must be p x p");
    }
    require_covariance(in.Sigma, pdim);
    if (!(in.eta > 0.0)) throw ContractError("loss_bound: eta must be positive");
    if (!(in.c > 0.0)) throw ContractError("loss_bound: c must be positive");
    const double x_norm = in.X.norm();
    if (x_norm == 0.0) throw ContractError("loss_bound: X is zero");

    BoundValue out;
    out.snr = snr(in.X, in.Sigma);
    const double tail = std::pow(n, -in.eta * in.eta);
    out.probability_statement = 1.0 - tail;
    out.probability_derivation = 1.0 - 2.0 * p * tail;

    const double lambda1 = sym_eigvals(in.Sigma)(0);
    if (lambda1 <= 0.0) {
        out.noiseless = true;
        return out;
    }

    const Vector s = singular_values(in.R);
    const double s1 = std::max(1.0, s(0));
    const double sp = std::min(1.0, s(s.size() - 1));

    out.a_n = std::sqrt(in.Sigma.trace() / lambda1 * std::log(n) / (in.c * n));
    const double prefactor = 2.0 * p / (sp * sp * x_norm * x_norm);
    const double bracket = 16.0 * s1 * x_norm * std::sqrt(2.0 * n) + 2.0 * n;
    out.bound = prefactor * (1.0 + in.eta * out.a_n) * lambda1 * bracket;
    return out;
}

LemmaSides procrustes_gap(const Matrix& X, const Permutation& pi) {
    check_perm(X, pi, "procrustes_gap");
    require_unit_condition(X, "procrustes_gap");
    const Matrix PX = pi.apply(X);
    const Vector s = singular_values(hcat(X, PX));
    return {orthogonal_procrustes(X, PX).loss, 2.0 * s.tail(X.cols()).squaredNorm()};
}

double maxuv_objective(const Matrix& A, const Matrix& U, const Matrix& V) {
    return 2.0 * (U.transpose() * A * V).trace();
}

MaxUvSides trace_max_check(const Matrix& X, const Permutation& pi, Rng& rng, std::size_t samples) {
    check_perm(X, pi, "trace_max_check");
    const Matrix A = X.transpose() * pi.apply(X);
    const auto p = static_cast<std::size_t>(X.cols());
    const Eigen::Index pp = X.cols();
    const double root2 = std::sqrt(2.0);
    const SvdResult f = svd(A);

    MaxUvSides out;
    out.rhs = f.S.sum();
    // Q1 Q2^T equals the trace maximizer V_A U_A^T.
    out.constructed = maxuv_objective(A, f.U / root2, f.V / root2);

    Matrix best_w(2 * pp, pp);
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < samples; ++k) {
        Matrix W(2 * pp, pp);
        W << random_orthogonal(p, rng) / root2, random_orthogonal(p, rng) / root2;
        const double value = maxuv_objective(A, W.topRows(pp), W.bottomRows(pp));
        if (value > best) {
            best = value;
            best_w = W;
        }
    }
    double step = 0.2;
    for (std::size_t k = 0; k < samples && best > -std::numeric_limits<double>::infinity(); ++k) {
        Matrix grad(2 * pp, pp);
        grad << A * best_w.bottomRows(pp), A.transpose() * best_w.topRows(pp);
        const Matrix noise = rng.normal_matrix(2 * pp, pp);
        const double gnorm = grad.norm();
        const Matrix dir = (gnorm > 0.0 ? Matrix(grad / gnorm) : Matrix(grad)) + 0.5 * noise / noise.norm();
        const Matrix W = orthonormalize(best_w + step * dir);
        const double value = maxuv_objective(A, W.topRows(pp), W.bottomRows(pp));
        if (value > best) {
            best = value;
            best_w = W;
            step = std::min(step * 1.5, 0.5);
        } else {
            step = std::max(step * 0.9, 1e-6);
        }
    }
    out.lhs = best;
    return out;
}

TailBound eig_tail_rhs(const Matrix& Sigma, std::size_t n, double eps, double c) {
    const auto p = static_cast<std::size_t>(Sigma.rows());
    require_covariance(Sigma, p);
    if (!(eps > 0.0) || eps > 4.0 * static_cast<double>(n)) {
        throw ContractError("eig_tail_rhs: eps must lie in (0, 4n]");
    }
    const double lambda1 = sym_eigvals(Sigma)(0);
    const double nuclear = Sigma.trace(); // PSD: nuclear norm equals trace
    if (nuclear <= 0.0) throw ContractError("eig_tail_rhs: Sigma is zero");
    const double exponent = -c * static_cast<double>(n) * eps * eps * lambda1 / nuclear;
    return {2.0 * static_cast<double>(p) * std::exp(exponent)};
}

TailFrequency eig_tail_empirical(const Matrix& Sigma, std::size_t n, double eps, std::size_t draws, Rng& rng) {
    const auto p = static_cast<std::size_t>(Sigma.rows());
    require_covariance(Sigma, p);
    TailFrequency out;
    out.draws = draws;
    out.threshold = 2.0 * static_cast<double>(n) * sym_eigvals(Sigma)(0) * (1.0 + eps);
    const Eigen::Index pp = Sigma.rows();
    for (std::size_t d = 0; d < draws; ++d) {
        const Matrix E1 = sample_noise(n, Sigma, rng);
        const Matrix E2 = sample_noise(n, Sigma, rng);
        const Matrix G1 = E1.transpose() * E1;
        const Matrix G2 = E2.transpose() * E2;
        const double sum = sym_eigvals(G1)(0) + sym_eigvals(G2)(0);
        Matrix joint(2 * pp, 2 * pp);
        joint << G2, E2.transpose() * E1, E1.transpose() * E2, G1;
        const double top = sym_eigvals(0.5 * (joint + joint.transpose()))(0);
        out.exceed_sum += sum >= out.threshold ? 1 : 0;
        out.exceed_joint += top >= out.threshold ? 1 : 0;
    }
    return out;
}

} // namespace stls
