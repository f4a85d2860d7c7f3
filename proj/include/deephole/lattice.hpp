#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

namespace deephole {

/// Plane point/vector. Templated on the scalar so evaluation kernels can run
/// in extended precision; `Vec2` is the double alias used by the public API.
template <class T>
struct Vec2T {
    T x{};
    T y{};

    friend Vec2T operator+(Vec2T a, Vec2T b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2T operator-(Vec2T a, Vec2T b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2T operator*(T s, Vec2T v) { return {s * v.x, s * v.y}; }
    friend bool operator==(Vec2T a, Vec2T b) { return a.x == b.x && a.y == b.y; }

    T dot(Vec2T o) const { return x * o.x + y * o.y; }
    T norm_sq() const { return x * x + y * y; }
    T norm() const { return std::sqrt(norm_sq()); }
};

using Vec2 = Vec2T<double>;
using Vec2L = Vec2T<long double>;

/// Integer coefficients (k, l) of a lattice point in a given basis.
struct IndexPair {
    std::int64_t k{};
    std::int64_t l{};

    friend auto operator<=>(const IndexPair&, const IndexPair&) = default;
};

/// Upper-half-plane chart of a unimodular lattice whose first basis vector is
/// horizontal:
///
///     v1(x, y) = y^{-1/2} (1, 0),   w1(x, y) = y^{-1/2} (x, y),   y > 0.
///
/// The chart enforces covolume 1 by construction; (x, y) = (0, 1) is the
/// square lattice.
struct LatticeParams {
    double x{0.0};
    double y{1.0};

    friend bool operator==(const LatticeParams&, const LatticeParams&) = default;
};

inline bool chart_point_valid(const LatticeParams& p) {
    return std::isfinite(p.x) && std::isfinite(p.y) && p.y > 0.0;
}

inline void require_chart_point(const LatticeParams& p) {
    if (!chart_point_valid(p))
        throw std::invalid_argument("invalid chart point: need finite (x, y) with y > 0");
}

template <class T>
std::pair<Vec2T<T>, Vec2T<T>> basis_at(T x, T y) {
    const T inv_root = T(1) / std::sqrt(y);
    return {Vec2T<T>{inv_root, T(0)}, Vec2T<T>{x * inv_root, y * inv_root}};
}

/// Canonical basis (v1, w1) of the chart point. Determinant is 1 up to
/// rounding for every valid chart point.
inline std::pair<Vec2, Vec2> basis(const LatticeParams& p) {
    require_chart_point(p);
    return basis_at(p.x, p.y);
}

/// Basis of the unit-covolume hexagonal lattice. Provided for density and
/// determinant sanity checks only; no hexagonal shell machinery exists.
inline std::pair<Vec2, Vec2> hexagonal_basis() {
    const double quartic_root3 = std::pow(3.0, 0.25);
    const double a = std::sqrt(2.0) / quartic_root3;
    const double b = 1.0 / (quartic_root3 * std::sqrt(2.0));
    return {Vec2{a, 0.0}, Vec2{b, b * std::sqrt(3.0)}};
}

/// Center of the standard fundamental domain [0,1]^2, the deep hole of the
/// square lattice. Fixed; never perturbed.
constexpr Vec2 deep_hole() { return {0.5, 0.5}; }

/// Orbit of (k, l) under the quarter-turn rotation about the deep hole:
/// (k, l) -> (1-l, k) -> (1-k, 1-l) -> (l, 1-k).
/// The four pairs are pairwise distinct for every integer input.
inline std::array<IndexPair, 4> quadruple_indices(IndexPair kl) {
    return {IndexPair{kl.k, kl.l},
            IndexPair{1 - kl.l, kl.k},
            IndexPair{1 - kl.k, 1 - kl.l},
            IndexPair{kl.l, 1 - kl.k}};
}

/// p + R^i (q - p), with R the counterclockwise quarter turn (R v = w,
/// R w = -v) and p the deep hole. i = 0 is the identity; R^4 = R^0.
/// Exact in floating point whenever q has half-integer coordinates.
inline Vec2 rotate_about_p(Vec2 q, int i) {
    const Vec2 p = deep_hole();
    double ox = q.x - p.x;
    double oy = q.y - p.y;
    const int turns = ((i % 4) + 4) % 4;
    for (int j = 0; j < turns; ++j) {
        const double t = ox;
        ox = -oy;
        oy = t;
    }
    return {p.x + ox, p.y + oy};
}

/// Radius class of lattice points around the deep hole, keyed by the exact
/// integer 4 r^2 = (2k-1)^2 + (2l-1)^2. Keying by an integer avoids all
/// floating-point equality hazards when grouping radii.
struct Shell {
    std::int64_t four_r_squared{};
    std::vector<IndexPair> indices;  // sorted, complete, quadruple-closed

    double radius() const { return std::sqrt(static_cast<double>(four_r_squared)) / 2.0; }
    std::size_t cardinality() const { return indices.size(); }

    friend bool operator==(const Shell&, const Shell&) = default;
};

namespace detail {

// All index pairs with (2k-1)^2 + (2l-1)^2 == key, sorted.
inline std::vector<IndexPair> shell_indices_for_key(std::int64_t key) {
    std::vector<IndexPair> out;
    if (key < 2) return out;
    const auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(key))) + 2;
    const std::int64_t k_lo = (1 - root) / 2 - 1, k_hi = (1 + root) / 2 + 1;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const std::int64_t a = 2 * k - 1;
        const std::int64_t rem = key - a * a;
        if (rem < 1) continue;
        for (std::int64_t l = k_lo; l <= k_hi; ++l) {
            const std::int64_t b = 2 * l - 1;
            if (a * a + b * b == key) out.push_back({k, l});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace detail

/// Shell with the exact key 4 r^2. The index list is empty when the key is
/// not a sum of two odd squares.
inline Shell shell_by_key(std::int64_t four_r_squared) {
    if (four_r_squared < 0)
        throw std::invalid_argument("shell_by_key: key must be nonnegative");
    return Shell{four_r_squared, detail::shell_indices_for_key(four_r_squared)};
}

/// All nonempty shells with 4 r^2 <= 4 r_max^2, sorted by key ascending.
/// Every index set is complete and closed under the quadruple map. Radii
/// below the deep-hole distance 1/sqrt(2) yield an empty result.
/// The comparison carries a relative margin of a few ulps so that an r_max
/// equal to an exact shell radius includes its boundary shell even after
/// rounding; shell keys are integers at least 8 apart, so the margin can
/// never pull in a spurious shell.
inline std::vector<Shell> enumerate_shells(double r_max) {
    if (!std::isfinite(r_max) || r_max < 0.0)
        throw std::invalid_argument("enumerate_shells: r_max must be finite and nonnegative");

    const double limit = 4.0 * r_max * r_max * (1.0 + 4e-15);
    // Safe bounding box: |2k-1| <= 2 r_max, then exact integer filtering.
    const auto k_lo = static_cast<std::int64_t>(std::ceil((1.0 - 2.0 * r_max) / 2.0)) - 1;
    const auto k_hi = static_cast<std::int64_t>(std::floor((1.0 + 2.0 * r_max) / 2.0)) + 1;

    std::map<std::int64_t, std::vector<IndexPair>> by_key;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        for (std::int64_t l = k_lo; l <= k_hi; ++l) {
            const std::int64_t a = 2 * k - 1, b = 2 * l - 1;
            const std::int64_t key = a * a + b * b;
            if (static_cast<double>(key) <= limit) by_key[key].push_back({k, l});
        }
    }

    std::vector<Shell> shells;
    shells.reserve(by_key.size());
    for (auto& [key, indices] : by_key) {
        std::sort(indices.begin(), indices.end());
        shells.push_back(Shell{key, std::move(indices)});
    }
    return shells;
}

template <class T>
Vec2T<T> point_at(T x, T y, IndexPair kl) {
    const T root_y = std::sqrt(y);
    return {(T(kl.k) + T(kl.l) * x) / root_y, T(kl.l) * root_y};
}

/// k v1 + l w1 in the chart basis.
inline Vec2 point(const LatticeParams& p, IndexPair kl) {
    require_chart_point(p);
    return point_at(p.x, p.y, kl);
}

/// Distance between two chart points: sqrt(|v_a - v_b|^2 + |w_a - w_b|^2)
/// over the canonical horizontal-first bases. The metric is basis dependent;
/// the chart convention pins it down.
inline double lattice_distance(const LatticeParams& a, const LatticeParams& b) {
    const auto [va, wa] = basis(a);
    const auto [vb, wb] = basis(b);
    return std::sqrt((va - vb).norm_sq() + (wa - wb).norm_sq());
}

}  // namespace deephole
