#include "stls/rng.hpp"

#include "stls/errors.hpp"

#include <cmath>
#include <numbers>

namespace stls {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
}

std::uint64_t Rng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng Rng::derive(std::uint64_t stream) const {
    return Rng(RawKey{}, mix(key_ ^ mix(stream + kGolden)));
}

Rng Rng::derive(std::initializer_list<std::uint64_t> path) const {
    Rng out(RawKey{}, key_);
    for (auto id : path) out = out.derive(id);
    return out;
}

std::uint64_t Rng::next_u64() {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
}

double Rng::uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = 1.0 - uniform(); // (0, 1]
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

std::size_t Rng::below(std::size_t bound) {
    if (bound == 0) throw ContractError("Rng::below: bound must be positive");
    // Rejection sampling keeps the draw exactly uniform.
    const std::uint64_t b = bound;
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b + 1) % b;
    std::uint64_t x = next_u64();
    while (x > limit) x = next_u64();
    return static_cast<std::size_t>(x % b);
}

Matrix Rng::normal_matrix(Eigen::Index rows, Eigen::Index cols) {
    Matrix out(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) out(i, j) = normal();
    return out;
}

} // namespace stls
