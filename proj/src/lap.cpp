#include "stls/lap.hpp"

#include "stls/errors.hpp"

#include <limits>
#include <vector>

namespace stls {

Assignment solve_lap(const Matrix& C) {
    if (C.rows() != C.cols()) throw ContractError("solve_lap: cost matrix must be square");
    require_finite(C, "solve_lap");

    const auto n = static_cast<std::size_t>(C.rows());
    constexpr double kInf = std::numeric_limits<double>::infinity();

    // 1-based arrays; column 0 is the virtual source of each augmentation.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> row_of_col(n + 1, 0), way(n + 1, 0);
    std::vector<double> minv(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        row_of_col[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), kInf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = row_of_col[j0];
            double delta = kInf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = C(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) - u[i0] - v[j];
                if (reduced < minv[j]) {
                    minv[j] = reduced;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of_col[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (row_of_col[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<std::size_t> map(n);
    for (std::size_t j = 1; j <= n; ++j) map[row_of_col[j] - 1] = j - 1;

    Assignment out{Permutation(std::move(map)), 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        out.cost += C(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(out.perm[i]));
    }
    return out;
}

} // namespace stls
