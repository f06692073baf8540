#include "stls/tls.hpp"

#include "stls/errors.hpp"

namespace stls {

namespace {

void check_shapes(const Matrix& Y2, const Matrix& Y1p, const char* what) {
    if (Y2.rows() != Y1p.rows() || Y2.cols() != Y1p.cols()) {
        throw ContractError(std::string(what) + ": Y2 and Y1p must have the same shape");
    }
    if (Y2.rows() < 2 * Y2.cols()) {
        throw ContractError(std::string(what) + ": requires n >= 2p");
    }
}

double tail_energy(const Vector& s, Eigen::Index p) {
    return s.tail(p).squaredNorm();
}

} // namespace

double tls_objective(const Matrix& Y2, const Matrix& Y1p) {
    check_shapes(Y2, Y1p, "tls_objective");
    return tail_energy(singular_values(hcat(Y2, Y1p)), Y2.cols());
}

TlsFit tls_fit(const Matrix& Y2, const Matrix& Y1p) {
    check_shapes(Y2, Y1p, "tls_fit");
    const Eigen::Index p = Y2.cols();
    const SvdResult f = svd(hcat(Y2, Y1p));

    const Matrix low_rank = f.U.leftCols(p) * f.S.head(p).asDiagonal() * f.V.leftCols(p).transpose();
    const Matrix Y2_hat = low_rank.leftCols(p);
    Matrix Y1_hat = low_rank.rightCols(p);

    const Vector s = singular_values(Y1_hat);
    if (s(0) == 0.0 || s(p - 1) <= 1e-10 * s(0)) {
        throw DegenerateFitError("tls_fit: truncated design block is singular");
    }

    TlsFit out;
    out.R_hat = Y1_hat.colPivHouseholderQr().solve(Y2_hat);
    out.X_hat = std::move(Y1_hat);
    out.objective = tail_energy(f.S, p);
    return out;
}

} // namespace stls
