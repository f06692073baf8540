#include "stls/estimators.hpp"

#include "stls/errors.hpp"
#include "stls/lap.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

namespace stls {

namespace {

void check_pair(const Matrix& Y1, const Matrix& Y2, const char* what) {
    if (Y1.rows() != Y2.rows() || Y1.cols() != Y2.cols()) {
        throw ContractError(std::string(what) + ": Y1 and Y2 must have the same shape");
    }
    require_finite(Y1, what);
    require_finite(Y2, what);
}

// out(i, j) = ||A_i - B_j||^2, row by row without the expanded form so exact
// matches give exact zeros.
Matrix pairwise_sq_dist(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows(), B.rows());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < B.rows(); ++j) out(i, j) = (A.row(i) - B.row(j)).squaredNorm();
    return out;
}

bool stalled(double previous, double current, double tol) {
    return std::abs(previous - current) <= tol * std::max(std::abs(previous), std::numeric_limits<double>::min());
}

// Tracks the alternating loop's bookkeeping shared by ALTA and ALOA.
class IterateLog {
public:
    explicit IterateLog(const Permutation& init) : best_(init) {}

    void record(const Permutation& perm, double value) {
        trace_.push_back(value);
        if (value < best_value_) {
            best_value_ = value;
            best_ = perm;
        }
    }

    [[nodiscard]] bool stalled_last(double tol) const {
        return trace_.size() >= 2 && stalled(trace_[trace_.size() - 2], trace_.back(), tol);
    }

    void visit(const Permutation& perm) { visited_.insert(perm.map()); }
    [[nodiscard]] bool seen(const Permutation& perm) const { return visited_.count(perm.map()) > 0; }

    EstimateResult finish(bool converged, std::optional<std::string> failure) && {
        EstimateResult out;
        out.perm = std::move(best_);
        out.iterations = trace_.size();
        out.objective = best_value_;
        out.objective_trace = std::move(trace_);
        out.converged = converged;
        out.failure = std::move(failure);
        return out;
    }

private:
    Permutation best_;
    double best_value_ = std::numeric_limits<double>::infinity();
    std::vector<double> trace_;
    std::set<std::vector<std::size_t>> visited_;
};

} // namespace

std::string_view to_string(CostKind kind) {
    switch (kind) {
    case CostKind::C1: return "c1";
    case CostKind::C2: return "c2";
    case CostKind::C3: return "c3";
    case CostKind::C4: return "c4";
    }
    return "?";
}

CostKind parse_cost_kind(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "c1") return CostKind::C1;
    if (lower == "c2") return CostKind::C2;
    if (lower == "c3") return CostKind::C3;
    if (lower == "c4") return CostKind::C4;
    throw ContractError("unknown cost kind '" + std::string(text) + "'");
}

EstimateResult brute_force_tls(const Matrix& Y1, const Matrix& Y2, std::size_t limit) {
    check_pair(Y1, Y2, "brute_force_tls");
    const auto n = static_cast<std::size_t>(Y1.rows());
    if (n > limit) {
        throw ContractError("brute_force_tls: n = " + std::to_string(n) +
                            " exceeds the enumeration limit " + std::to_string(limit));
    }

    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), std::size_t{0});
    std::vector<std::size_t> best_map = map;
    double best = std::numeric_limits<double>::infinity();
    Matrix Y1p(Y1.rows(), Y1.cols());
    do {
        for (std::size_t i = 0; i < n; ++i) {
            Y1p.row(static_cast<Eigen::Index>(i)) = Y1.row(static_cast<Eigen::Index>(map[i]));
        }
        const double value = tls_objective(Y2, Y1p);
        if (value < best) {
            best = value;
            best_map = map;
        }
    } while (std::next_permutation(map.begin(), map.end()));

    EstimateResult out;
    out.perm = Permutation(std::move(best_map));
    out.iterations = 1;
    out.objective_trace = {best};
    out.converged = true;
    out.objective = best;
    out.tls_objective = best;
    return out;
}

Matrix build_cost(CostKind kind, const TlsFit& fit, const Permutation& current,
                  const Matrix& Y1, const Matrix& Y2) {
    check_pair(Y1, Y2, "build_cost");
    if (current.size() != static_cast<std::size_t>(Y1.rows()) || fit.X_hat.rows() != Y1.rows() ||
        fit.X_hat.cols() != Y1.cols() || fit.R_hat.rows() != Y1.cols() || fit.R_hat.cols() != Y1.cols()) {
        throw ContractError("build_cost: fit, permutation and data dimensions disagree");
    }

    auto c1 = [&] {
        // Fitted row k pairs Y2 row k with Y1 row current[k].
        const Matrix fitted = current.inverse().apply(fit.X_hat * fit.R_hat);
        return pairwise_sq_dist(Y2, fitted);
    };
    auto c2 = [&] { return pairwise_sq_dist(fit.X_hat, Y1); };

    switch (kind) {
    case CostKind::C1: return c1();
    case CostKind::C2: return c2();
    case CostKind::C3: return c1() + c2();
    case CostKind::C4: {
        // x* = M^{-1} (R y2 + y1) with M = R R^T + I, written for row vectors:
        // x*^T = u_i + w_j with u = Y2 R^T M^{-1}, w = Y1 M^{-1}.
        const Matrix& R = fit.R_hat;
        const Eigen::Index p = R.rows();
        const Matrix M = R * R.transpose() + Matrix::Identity(p, p);
        const Eigen::LLT<Matrix> llt(M);
        const Matrix Minv = llt.solve(Matrix::Identity(p, p));
        const Matrix U = Y2 * R.transpose() * Minv;
        const Matrix W = Y1 * Minv;
        // Residuals split by row/column index:
        //   y2_i - R^T x* = (y2_i - R^T u_i) - R^T w_j
        //   y1_j - x*     = (y1_j - w_j) - u_i
        const Matrix a = Y2 - U * R;
        const Matrix b = W * R;
        const Matrix d = Y1 - W;
        Matrix C(Y2.rows(), Y1.rows());
        for (Eigen::Index i = 0; i < C.rows(); ++i)
            for (Eigen::Index j = 0; j < C.cols(); ++j)
                C(i, j) = (a.row(i) - b.row(j)).squaredNorm() + (d.row(j) - U.row(i)).squaredNorm();
        return C;
    }
    }
    throw ContractError("build_cost: unknown cost kind");
}

EstimateResult alta(const Matrix& Y1, const Matrix& Y2, const Permutation& init,
                    CostKind kind, const IterationLimits& limits) {
    check_pair(Y1, Y2, "alta");
    if (init.size() != static_cast<std::size_t>(Y1.rows())) throw ContractError("alta: init has wrong size");
    if (Y1.rows() < 2 * Y1.cols()) throw ContractError("alta: requires n >= 2p");
    if (limits.max_iter < 1) throw ContractError("alta: max_iter must be positive");

    IterateLog log(init);
    Permutation current = init;
    bool converged = false;
    std::optional<std::string> failure;
    for (std::size_t iter = 0; iter < limits.max_iter; ++iter) {
        const Matrix Y1p = current.apply(Y1);
        TlsFit fit;
        try {
            fit = tls_fit(Y2, Y1p);
        } catch (const DegenerateFitError& e) {
            log.record(current, tls_objective(Y2, Y1p));
            failure = e.what();
            break;
        }
        log.record(current, fit.objective);
        if (fit.objective <= 0.0 || log.stalled_last(limits.tol)) {
            converged = true;
            break;
        }
        log.visit(current);
        Permutation next = solve_lap(build_cost(kind, fit, current, Y1, Y2)).perm;
        if (log.seen(next)) {
            converged = true;
            break;
        }
        current = std::move(next);
    }

    EstimateResult out = std::move(log).finish(converged, std::move(failure));
    out.tls_objective = out.objective;
    return out;
}

EstimateResult aloa(const Matrix& Y1, const Matrix& Y2, const Permutation& init,
                    const IterationLimits& limits) {
    check_pair(Y1, Y2, "aloa");
    if (init.size() != static_cast<std::size_t>(Y1.rows())) throw ContractError("aloa: init has wrong size");
    if (limits.max_iter < 1) throw ContractError("aloa: max_iter must be positive");
    if (Y1.rows() < Y1.cols() || condition_number(Y1).rank_deficient) {
        throw ContractError("aloa: Y1 must have full column rank");
    }

    IterateLog log(init);
    Permutation current = init;
    bool converged = false;
    for (std::size_t iter = 0; iter < limits.max_iter; ++iter) {
        const Matrix Y1p = current.apply(Y1);
        const Matrix R_hat = Y1p.colPivHouseholderQr().solve(Y2);
        const double residual = (Y2 - Y1p * R_hat).squaredNorm();
        log.record(current, residual);
        if (residual <= 0.0 || log.stalled_last(limits.tol)) {
            converged = true;
            break;
        }
        log.visit(current);
        // Rows index Y2, columns index rows of Y1 R_hat (= rows of Y1).
        Permutation next = solve_lap(pairwise_sq_dist(Y2, Y1 * R_hat)).perm;
        if (log.seen(next)) {
            converged = true;
            break;
        }
        current = std::move(next);
    }

    EstimateResult out = std::move(log).finish(converged, std::nullopt);
    out.tls_objective = Y1.rows() >= 2 * Y1.cols() ? tls_objective(Y2, out.perm.apply(Y1))
                                                   : std::numeric_limits<double>::quiet_NaN();
    return out;
}

} // namespace stls
