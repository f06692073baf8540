#pragma once

#include "stls/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace stls {

/// Bijection on {0, ..., n-1}.
///
/// Applying a permutation `pi` to a matrix A yields B with row i of B equal
/// to row pi(i) of A, i.e. B = Pi * A for the permutation matrix with
/// Pi(i, pi(i)) = 1. Every loss, cost matrix and estimator uses this reading.
class Permutation {
public:
    Permutation() = default;
    /// Throws ContractError unless `map` is a bijection.
    explicit Permutation(std::vector<std::size_t> map);

    static Permutation identity(std::size_t n);

    [[nodiscard]] std::size_t size() const { return map_.size(); }
    [[nodiscard]] std::size_t operator[](std::size_t i) const { return map_[i]; }
    [[nodiscard]] const std::vector<std::size_t>& map() const { return map_; }

    [[nodiscard]] Permutation inverse() const;
    /// (this o other)(i) = this(other(i)).
    [[nodiscard]] Permutation compose(const Permutation& other) const;
    /// Row i of the result is row (*this)[i] of A.
    [[nodiscard]] Matrix apply(const Matrix& A) const;
    [[nodiscard]] Matrix to_matrix() const;
    [[nodiscard]] std::uint64_t hash() const;

    friend bool operator==(const Permutation&, const Permutation&) = default;

private:
    std::vector<std::size_t> map_;
};

} // namespace stls
