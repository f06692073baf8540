#include "stls/permutation.hpp"

#include "stls/errors.hpp"
#include "stls/rng.hpp"

#include <numeric>

namespace stls {

Permutation::Permutation(std::vector<std::size_t> map) : map_(std::move(map)) {
    std::vector<bool> seen(map_.size(), false);
    for (auto v : map_) {
        if (v >= map_.size() || seen[v]) {
            throw ContractError("Permutation: map is not a bijection");
        }
        seen[v] = true;
    }
}

Permutation Permutation::identity(std::size_t n) {
    std::vector<std::size_t> map(n);
    std::iota(map.begin(), map.end(), std::size_t{0});
    Permutation out;
    out.map_ = std::move(map);
    return out;
}

Permutation Permutation::inverse() const {
    std::vector<std::size_t> inv(map_.size());
    for (std::size_t i = 0; i < map_.size(); ++i) inv[map_[i]] = i;
    Permutation out;
    out.map_ = std::move(inv);
    return out;
}

Permutation Permutation::compose(const Permutation& other) const {
    if (other.size() != size()) throw ContractError("Permutation::compose: size mismatch");
    std::vector<std::size_t> out(size());
    for (std::size_t i = 0; i < size(); ++i) out[i] = map_[other.map_[i]];
    Permutation p;
    p.map_ = std::move(out);
    return p;
}

Matrix Permutation::apply(const Matrix& A) const {
    if (static_cast<std::size_t>(A.rows()) != map_.size()) {
        throw ContractError("Permutation::apply: row count does not match permutation size");
    }
    Matrix B(A.rows(), A.cols());
    for (std::size_t i = 0; i < map_.size(); ++i) {
        B.row(static_cast<Eigen::Index>(i)) = A.row(static_cast<Eigen::Index>(map_[i]));
    }
    return B;
}

Matrix Permutation::to_matrix() const {
    const auto n = static_cast<Eigen::Index>(map_.size());
    Matrix P = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) P(i, static_cast<Eigen::Index>(map_[static_cast<std::size_t>(i)])) = 1.0;
    return P;
}

std::uint64_t Permutation::hash() const {
    std::uint64_t h = Rng::mix(map_.size());
    for (auto v : map_) h = Rng::mix(h ^ (v + 0x9e3779b97f4a7c15ULL));
    return h;
}

} // namespace stls
