#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <set>

#include "deephole/lattice.hpp"

using namespace deephole;
using Catch::Approx;

namespace {

double basis_det(const std::pair<Vec2, Vec2>& b) {
    return b.first.x * b.second.y - b.first.y * b.second.x;
}

// Independent oracle: naive double loop over k, l in [-10, 10], grouped by
// the exact integer key (2k-1)^2 + (2l-1)^2.
std::map<std::int64_t, std::set<std::pair<std::int64_t, std::int64_t>>> brute_shells(double r_max) {
    std::map<std::int64_t, std::set<std::pair<std::int64_t, std::int64_t>>> out;
    const double limit = 4.0 * r_max * r_max;
    for (std::int64_t k = -10; k <= 10; ++k)
        for (std::int64_t l = -10; l <= 10; ++l) {
            const std::int64_t key = (2 * k - 1) * (2 * k - 1) + (2 * l - 1) * (2 * l - 1);
            if (static_cast<double>(key) <= limit) out[key].insert({k, l});
        }
    return out;
}

}  // namespace

TEST_CASE("basis of the chart") {
    SECTION("square lattice at (0, 1)") {
        const auto [v, w] = basis({0.0, 1.0});
        CHECK(v == Vec2{1.0, 0.0});
        CHECK(w == Vec2{0.0, 1.0});
    }
    SECTION("tall chart point (0, 4)") {
        const auto [v, w] = basis({0.0, 4.0});
        CHECK(v == Vec2{0.5, 0.0});
        CHECK(w == Vec2{0.0, 2.0});
    }
    SECTION("sheared chart point keeps determinant 1") {
        const auto b = basis({0.01, 1.0});
        CHECK(b.second == Vec2{0.01, 1.0});
        CHECK(basis_det(b) == Approx(1.0).margin(1e-12));
    }
    SECTION("rejects invalid chart points") {
        CHECK_THROWS_AS(basis({0.0, 0.0}), std::invalid_argument);
        CHECK_THROWS_AS(basis({0.0, -1.0}), std::invalid_argument);
        CHECK_THROWS_AS(basis({std::nan(""), 1.0}), std::invalid_argument);
        CHECK_THROWS_AS(basis({0.0, std::numeric_limits<double>::infinity()}),
                        std::invalid_argument);
    }
    SECTION("unimodular for random chart points") {
        std::mt19937_64 rng(2024);
        std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.3, 3.0);
        for (int i = 0; i < 2000; ++i) {
            const auto b = basis({ux(rng), uy(rng)});
            REQUIRE(basis_det(b) == Approx(1.0).margin(1e-12));
        }
    }
}

TEST_CASE("hexagonal basis") {
    const auto [v, w] = hexagonal_basis();
    CHECK(v.x == Approx(1.0745699318235419).epsilon(1e-15));
    CHECK(v.y == 0.0);
    CHECK(w.x == Approx(0.5372849659117710).epsilon(1e-15));
    CHECK(w.y == Approx(0.9306048591020996).epsilon(1e-15));
    CHECK(basis_det({v, w}) == Approx(1.0).margin(1e-12));
    CHECK(v.norm() == Approx(1.0745699318235419).epsilon(1e-15));
}

TEST_CASE("deep hole") {
    CHECK(deep_hole() == Vec2{0.5, 0.5});
    CHECK((Vec2{0.0, 0.0} - deep_hole()).norm() == Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    const auto [v, w] = basis({0.0, 1.0});
    CHECK(0.5 * (v + w) == deep_hole());
}

TEST_CASE("quadruple index orbits") {
    SECTION("worked examples") {
        CHECK(quadruple_indices({0, 0}) ==
              std::array<IndexPair, 4>{IndexPair{0, 0}, {1, 0}, {1, 1}, {0, 1}});
        CHECK(quadruple_indices({2, 3}) ==
              std::array<IndexPair, 4>{IndexPair{2, 3}, {-2, 2}, {-1, -2}, {3, -1}});
        CHECK(quadruple_indices({1, 1}) ==
              std::array<IndexPair, 4>{IndexPair{1, 1}, {0, 1}, {0, 0}, {1, 0}});
    }
    SECTION("pairwise distinct and cyclic") {
        std::mt19937_64 rng(99);
        std::uniform_int_distribution<std::int64_t> ik(-500, 500);
        for (int i = 0; i < 2000; ++i) {
            const IndexPair kl{ik(rng), ik(rng)};
            const auto orbit = quadruple_indices(kl);
            const std::set<IndexPair> unique(orbit.begin(), orbit.end());
            REQUIRE(unique.size() == 4);
            // applying the map to any member walks the same set
            for (const auto& member : orbit) {
                const auto image = quadruple_indices(member);
                REQUIRE(std::set<IndexPair>(image.begin(), image.end()) == unique);
            }
        }
    }
    SECTION("orbit equals the rotation images of the lattice point") {
        for (std::int64_t k = -12; k <= 12; ++k)
            for (std::int64_t l = -12; l <= 12; ++l) {
                const auto orbit = quadruple_indices({k, l});
                const Vec2 z{static_cast<double>(k), static_cast<double>(l)};
                for (int i = 0; i < 4; ++i) {
                    const Vec2 expect = rotate_about_p(z, i);
                    const Vec2 got = point({0.0, 1.0}, orbit[static_cast<std::size_t>(i)]);
                    REQUIRE(got == expect);  // exact: everything is a half-integer
                }
            }
    }
}

TEST_CASE("rotation about the deep hole") {
    CHECK(rotate_about_p({1.0, 0.0}, 1) == Vec2{1.0, 1.0});
    CHECK(rotate_about_p({0.0, 0.0}, 2) == Vec2{1.0, 1.0});
    CHECK(rotate_about_p({3.0, -1.0}, 4) == Vec2{3.0, -1.0});
    CHECK(rotate_about_p({0.25, 0.75}, 0) == Vec2{0.25, 0.75});
    // R v = w and R w = -v for the offsets from p
    CHECK(rotate_about_p(deep_hole() + Vec2{1.0, 0.0}, 1) == deep_hole() + Vec2{0.0, 1.0});
    CHECK(rotate_about_p(deep_hole() + Vec2{0.0, 1.0}, 1) == deep_hole() + Vec2{-1.0, 0.0});
}

TEST_CASE("shell enumeration") {
    SECTION("r_max = 0.8 yields the innermost shell only") {
        const auto shells = enumerate_shells(0.8);
        REQUIRE(shells.size() == 1);
        CHECK(shells[0].four_r_squared == 2);
        CHECK(shells[0].indices ==
              std::vector<IndexPair>{{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    }
    SECTION("r_max = 1.6 yields keys 2 and 10") {
        const auto shells = enumerate_shells(1.6);
        REQUIRE(shells.size() == 2);
        CHECK(shells[0].four_r_squared == 2);
        CHECK(shells[1].four_r_squared == 10);
        CHECK(shells[1].indices ==
              std::vector<IndexPair>{{-1, 0}, {-1, 1}, {0, -1}, {0, 2}, {1, -1}, {1, 2}, {2, 0},
                                     {2, 1}});
    }
    SECTION("boundary radius is included") {
        const auto shells = enumerate_shells(1.0 / std::sqrt(2.0));
        REQUIRE(shells.size() == 1);
        CHECK(shells[0].four_r_squared == 2);
    }
    SECTION("radii below the deep-hole distance yield nothing") {
        CHECK(enumerate_shells(0.5).empty());
    }
    SECTION("rejects bad radii") {
        CHECK_THROWS_AS(enumerate_shells(-1.0), std::invalid_argument);
        CHECK_THROWS_AS(enumerate_shells(std::nan("")), std::invalid_argument);
        CHECK_THROWS_AS(enumerate_shells(std::numeric_limits<double>::infinity()),
                        std::invalid_argument);
    }
    SECTION("agrees with the brute-force scan up to r_max = 6") {
        for (const double r_max : {0.71, 1.0, 1.8, 2.5, 3.3, 4.0, 5.2, 6.0}) {
            const auto shells = enumerate_shells(r_max);
            const auto expect = brute_shells(r_max);
            REQUIRE(shells.size() == expect.size());
            std::size_t i = 0;
            for (const auto& [key, indices] : expect) {
                REQUIRE(shells[i].four_r_squared == key);
                std::set<std::pair<std::int64_t, std::int64_t>> got;
                for (const auto& kl : shells[i].indices) got.insert({kl.k, kl.l});
                REQUIRE(got == indices);
                ++i;
            }
        }
    }
    SECTION("shell invariants: exact key, closure, multiplicity of 4") {
        for (const auto& shell : enumerate_shells(6.0)) {
            REQUIRE(shell.cardinality() % 4 == 0);
            const std::set<IndexPair> members(shell.indices.begin(), shell.indices.end());
            for (const auto& kl : shell.indices) {
                const std::int64_t a = 2 * kl.k - 1, b = 2 * kl.l - 1;
                REQUIRE(a * a + b * b == shell.four_r_squared);
                REQUIRE(members.count({1 - kl.l, kl.k}) == 1);
            }
        }
    }
}

TEST_CASE("shell lookup by key") {
    CHECK(shell_by_key(2).indices.size() == 4);
    CHECK(shell_by_key(10).indices.size() == 8);
    CHECK(shell_by_key(50).indices.size() == 12);
    CHECK(shell_by_key(4).indices.empty());  // not a sum of two odd squares
    CHECK(shell_by_key(0).indices.empty());
    CHECK_THROWS_AS(shell_by_key(-2), std::invalid_argument);
    CHECK(shell_by_key(10) == enumerate_shells(1.6).back());
}

TEST_CASE("lattice points from index pairs") {
    CHECK(point({0.0, 1.0}, {3, -2}) == Vec2{3.0, -2.0});
    CHECK(point({0.01, 1.0}, {0, 1}) == Vec2{0.01, 1.0});
    CHECK(point({0.0, 4.0}, {1, 1}) == Vec2{0.5, 2.0});
    CHECK_THROWS_AS(point({0.0, -1.0}, {0, 0}), std::invalid_argument);

    SECTION("matches k v1 + l w1 at random chart points") {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.4, 2.5);
        std::uniform_int_distribution<std::int64_t> ik(-9, 9);
        for (int i = 0; i < 2000; ++i) {
            const LatticeParams p{ux(rng), uy(rng)};
            const IndexPair kl{ik(rng), ik(rng)};
            const auto [v, w] = basis(p);
            const Vec2 expect = static_cast<double>(kl.k) * v + static_cast<double>(kl.l) * w;
            const Vec2 got = point(p, kl);
            REQUIRE(got.x == Approx(expect.x).margin(1e-13));
            REQUIRE(got.y == Approx(expect.y).margin(1e-13));
        }
    }
}

TEST_CASE("lattice distance") {
    CHECK(lattice_distance({0.0, 1.0}, {0.01, 1.0}) == 0.01);
    CHECK(lattice_distance({0.0, 1.0}, {0.0, 1.0}) == 0.0);
    CHECK(lattice_distance({0.0, 1.0}, {0.0, 1.02}) ==
          Approx(0.014002972433768805).epsilon(1e-14));
    CHECK_THROWS_AS(lattice_distance({0.0, 0.0}, {0.0, 1.0}), std::invalid_argument);

    SECTION("metric axioms on random triples") {
        std::mt19937_64 rng(11);
        std::uniform_real_distribution<double> ux(-0.5, 0.5), uy(0.5, 2.0);
        for (int i = 0; i < 10000; ++i) {
            const LatticeParams a{ux(rng), uy(rng)}, b{ux(rng), uy(rng)}, c{ux(rng), uy(rng)};
            const double ab = lattice_distance(a, b);
            const double ba = lattice_distance(b, a);
            REQUIRE(ab == ba);
            REQUIRE(lattice_distance(a, a) == 0.0);
            REQUIRE(ab >= 0.0);
            if (!(a == b)) REQUIRE(ab > 0.0);
            REQUIRE(lattice_distance(a, c) <= ab + lattice_distance(b, c) + 1e-12);
        }
    }
}
