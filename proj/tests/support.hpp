#pragma once

// Shared fixtures and independent oracles for the test binaries. Nothing in
// here calls the library routine it is used to check.

#include "stls/linalg.hpp"
#include "stls/permutation.hpp"
#include "stls/rng.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>
#include <vector>

namespace stls::testing {

// 10 x 2 design: five rows (1, -1) then five rows (1, 1).
inline Matrix block_design() {
    Matrix X(10, 2);
    for (int i = 0; i < 5; ++i) X.row(i) << 1.0, -1.0;
    for (int i = 5; i < 10; ++i) X.row(i) << 1.0, 1.0;
    return X;
}

// Swaps the two blocks of five rows.
inline Permutation block_swap() {
    std::vector<std::size_t> map(10);
    for (std::size_t i = 0; i < 10; ++i) map[i] = (i + 5) % 10;
    return Permutation(map);
}

// Haar orthogonal matrix from Eigen's Householder QR (not the library's).
inline Matrix haar_orthogonal(Eigen::Index p, Rng& rng) {
    const Matrix G = rng.normal_matrix(p, p);
    Eigen::HouseholderQR<Matrix> qr(G);
    Matrix Q = qr.householderQ();
    const Matrix R = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index j = 0; j < p; ++j) {
        if (R(j, j) < 0.0) Q.col(j) *= -1.0;
    }
    return Q;
}

// Minimum assignment cost by enumerating every permutation.
inline double exhaustive_lap(const Matrix& C) {
    std::vector<std::size_t> perm(static_cast<std::size_t>(C.rows()));
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    double best = std::numeric_limits<double>::infinity();
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < perm.size(); ++i) {
            cost += C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(perm[i]));
        }
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best;
}

// min over O(2) of ||A - B Q||_F^2: scan rotations and reflections at `step`
// radians, then golden-section refine inside the winning cell of each branch.
inline double procrustes_grid_2d(const Matrix& A, const Matrix& B, double step = 1e-3) {
    const auto value = [&](double t, bool reflect) {
        const double c = std::cos(t), s = std::sin(t);
        Matrix Q(2, 2);
        if (reflect) {
            Q << c, s, s, -c;
        } else {
            Q << c, -s, s, c;
        }
        return (A - B * Q).squaredNorm();
    };
    double best = std::numeric_limits<double>::infinity();
    const int count = static_cast<int>(std::ceil(2.0 * std::numbers::pi / step));
    for (bool reflect : {false, true}) {
        int arg = 0;
        double coarse = std::numeric_limits<double>::infinity();
        for (int k = 0; k < count; ++k) {
            const double v = value(k * step, reflect);
            if (v < coarse) {
                coarse = v;
                arg = k;
            }
        }
        double lo = (arg - 1) * step, hi = (arg + 1) * step;
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        for (int it = 0; it < 60; ++it) {
            const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
            if (value(m1, reflect) < value(m2, reflect)) {
                hi = m2;
            } else {
                lo = m1;
            }
        }
        best = std::min({best, coarse, value(0.5 * (lo + hi), reflect)});
    }
    return best;
}

// Nelder-Mead minimization with restarts; returns the best value found.
inline double nelder_mead(const std::function<double(const Vector&)>& f, Vector x0, double scale = 1.0,
                          int iterations = 4000) {
    const Eigen::Index d = x0.size();
    double overall = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < 3; ++restart) {
        std::vector<Vector> pts{x0};
        for (Eigen::Index i = 0; i < d; ++i) {
            Vector v = x0;
            v(i) += scale;
            pts.push_back(v);
        }
        std::vector<double> vals;
        for (const auto& p : pts) vals.push_back(f(p));
        for (int it = 0; it < iterations; ++it) {
            std::vector<std::size_t> idx(pts.size());
            std::iota(idx.begin(), idx.end(), std::size_t{0});
            std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return vals[a] < vals[b]; });
            std::vector<Vector> sp;
            std::vector<double> sv;
            for (auto i : idx) {
                sp.push_back(pts[i]);
                sv.push_back(vals[i]);
            }
            pts = sp;
            vals = sv;
            Vector centroid = Vector::Zero(d);
            for (std::size_t i = 0; i + 1 < pts.size(); ++i) centroid += pts[i];
            centroid /= static_cast<double>(d);
            const Vector xr = centroid + (centroid - pts.back());
            const double fr = f(xr);
            if (fr < vals.front()) {
                const Vector xe = centroid + 2.0 * (centroid - pts.back());
                const double fe = f(xe);
                if (fe < fr) {
                    pts.back() = xe;
                    vals.back() = fe;
                } else {
                    pts.back() = xr;
                    vals.back() = fr;
                }
            } else if (fr < vals[vals.size() - 2]) {
                pts.back() = xr;
                vals.back() = fr;
            } else {
                const Vector xc = centroid + 0.5 * (pts.back() - centroid);
                const double fc = f(xc);
                if (fc < vals.back()) {
                    pts.back() = xc;
                    vals.back() = fc;
                } else {
                    for (std::size_t i = 1; i < pts.size(); ++i) {
                        pts[i] = pts[0] + 0.5 * (pts[i] - pts[0]);
                        vals[i] = f(pts[i]);
                    }
                }
            }
        }
        const auto best = std::min_element(vals.begin(), vals.end()) - vals.begin();
        x0 = pts[static_cast<std::size_t>(best)];
        overall = std::min(overall, vals[static_cast<std::size_t>(best)]);
        scale *= 0.1;
    }
    return overall;
}

// Closed-form bound written out term by term from the published statement.
inline double reference_bound(double n, double p, double x_fro, double s1, double sp, double lambda1, double trace,
                              double eta, double c) {
    const double a_n = std::sqrt((trace / lambda1) * (std::log(n) / (c * n)));
    const double lead = 2.0 * p / (sp * sp * x_fro * x_fro);
    const double bracket = 16.0 * s1 * x_fro * std::sqrt(2.0 * n) + 2.0 * n;
    return lead * (1.0 + eta * a_n) * lambda1 * bracket;
}

} // namespace stls::testing
