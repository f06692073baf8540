#pragma once

#include "stls/linalg.hpp"

#include <cstddef>
#include <cstdint>
#include <initializer_list>

namespace stls {

/// Counter-based generator: the n-th draw is a pure function of (key, n), so
/// a stream is reproducible on any platform and independent sub-streams are
/// obtained by hashing extra identifiers into the key (see derive()).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : key_(mix(seed ^ 0x6a09e667f3bcc909ULL)) {}

    /// Independent child stream keyed by `stream`.
    [[nodiscard]] Rng derive(std::uint64_t stream) const;
    /// Child stream keyed by a path of identifiers, e.g. {grid, trial, tag}.
    [[nodiscard]] Rng derive(std::initializer_list<std::uint64_t> path) const;

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal via Box-Muller (pairs are cached).
    double normal();
    /// Uniform integer on [0, bound); bound must be > 0.
    std::size_t below(std::size_t bound);
    /// rows x cols matrix of i.i.d. standard normals, filled row by row.
    Matrix normal_matrix(Eigen::Index rows, Eigen::Index cols);

    [[nodiscard]] std::uint64_t key() const { return key_; }
    [[nodiscard]] std::uint64_t counter() const { return counter_; }

    static std::uint64_t mix(std::uint64_t z);

private:
    struct RawKey {};
    Rng(RawKey, std::uint64_t key) : key_(key) {}

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace stls
