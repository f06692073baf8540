#include "support.hpp"

#include "stls/errors.hpp"
#include "stls/lap.hpp"
#include "stls/model.hpp"

#include <doctest.h>

#include <set>

using namespace stls;
using stls::testing::exhaustive_lap;

namespace {

bool is_bijection(const Permutation& pi) {
    std::set<std::size_t> seen(pi.map().begin(), pi.map().end());
    return seen.size() == pi.size() && (pi.size() == 0 || *seen.rbegin() == pi.size() - 1);
}

} // namespace

TEST_CASE("lap finds a planted zero-cost permutation") {
    Rng rng(1);
    const Permutation planted = random_permutation(7, rng);
    Matrix C = Matrix::Ones(7, 7);
    for (std::size_t i = 0; i < 7; ++i) C(Eigen::Index(i), Eigen::Index(planted[i])) = 0.0;
    const Assignment a = solve_lap(C);
    CHECK(a.perm == planted);
    CHECK(a.cost == 0.0);
}

TEST_CASE("lap small examples") {
    Matrix C(2, 2);
    C << 1, 2, 3, 1;
    const Assignment a = solve_lap(C);
    CHECK(a.perm == Permutation::identity(2));
    CHECK(a.cost == 2.0);

    const Assignment k = solve_lap(Matrix::Constant(5, 5, 3.5));
    CHECK(k.cost == 5 * 3.5);
    CHECK(is_bijection(k.perm));

    Matrix one(1, 1);
    one << -2.0;
    CHECK(solve_lap(one).cost == -2.0);
}

TEST_CASE("lap equals exhaustive enumeration") {
    Rng rng(2);
    for (int t = 0; t < 500; ++t) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(6));
        Matrix C = rng.normal_matrix(n, n);
        if (t % 3 == 0) C = C.array().round(); // integer costs create ties
        const Assignment a = solve_lap(C);
        REQUIRE(is_bijection(a.perm));
        double recomputed = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) recomputed += C(i, Eigen::Index(a.perm[std::size_t(i)]));
        CHECK(a.cost == recomputed);
        CHECK(a.cost == exhaustive_lap(C));
    }
}

TEST_CASE("lap is shift invariant per row") {
    Rng rng(3);
    for (int t = 0; t < 50; ++t) {
        const Matrix C = rng.normal_matrix(6, 6);
        const double base = solve_lap(C).cost;
        Matrix shifted = C;
        const auto row = static_cast<Eigen::Index>(rng.below(6));
        shifted.row(row).array() += 2.5;
        const Assignment a = solve_lap(shifted);
        CHECK(a.cost - 2.5 == doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("lap rejects invalid cost matrices") {
    CHECK_THROWS_AS(solve_lap(Matrix::Ones(2, 3)), ContractError);
    Matrix C = Matrix::Ones(2, 2);
    C(0, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_lap(C), ContractError);
}
