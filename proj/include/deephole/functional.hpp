#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deephole/lattice.hpp"

namespace deephole {

/// Symmetric 2x2 matrix; a single off-diagonal field keeps it symmetric by
/// construction.
template <class T>
struct SymMatrix2T {
    T a11{};
    T a12{};
    T a22{};

    friend bool operator==(const SymMatrix2T&, const SymMatrix2T&) = default;
};

using SymMatrix2 = SymMatrix2T<double>;

/// Eigenvalues (lambda_min, lambda_max) of a symmetric 2x2 matrix:
/// mean +- sqrt(((a11-a22)/2)^2 + a12^2).
template <class T>
std::pair<T, T> eig_sym2(const SymMatrix2T<T>& m) {
    const T mean = (m.a11 + m.a22) / T(2);
    const T disc = std::hypot((m.a11 - m.a22) / T(2), m.a12);
    return {mean - disc, mean + disc};
}

/// Unit eigenvector for a given eigenvalue, from the more stable row of
/// M - lambda I. Falls back to (1, 0) for scalar matrices.
template <class T>
Vec2T<T> eig_sym2_vector(const SymMatrix2T<T>& m, T lambda) {
    const Vec2T<T> row1{m.a11 - lambda, m.a12};
    const Vec2T<T> row2{m.a12, m.a22 - lambda};
    const Vec2T<T> row = row1.norm_sq() >= row2.norm_sq() ? row1 : row2;
    const T n = row.norm();
    if (n == T(0)) return {T(1), T(0)};
    return {-row.y / n, row.x / n};
}

/// Monotone increasing convex function on (0, inf) together with its first
/// derivative. Callables take and return long double so extended-precision
/// evaluation paths lose nothing.
struct ConvexFn {
    std::function<long double(long double)> phi;
    std::function<long double(long double)> dphi;
    std::string label;
};

inline ConvexFn convex_square() {
    return {[](long double t) { return t * t; },
            [](long double t) { return 2 * t; },
            "square"};
}

inline ConvexFn convex_identity() {
    return {[](long double t) { return t; },
            [](long double) { return 1.0L; },
            "linear"};
}

inline ConvexFn convex_exp() {
    return {[](long double t) { return std::exp(t); },
            [](long double t) { return std::exp(t); },
            "exp"};
}

inline ConvexFn convex_pow3() {
    return {[](long double t) { return t * t * t; },
            [](long double t) { return 3 * t * t; },
            "pow3"};
}

inline std::optional<ConvexFn> convex_by_label(std::string_view label) {
    if (label == "square") return convex_square();
    if (label == "linear") return convex_identity();
    if (label == "exp") return convex_exp();
    if (label == "pow3") return convex_pow3();
    return std::nullopt;
}

/// Sampled validity check: monotone increasing, midpoint convex within 1e-9,
/// and dphi consistent with a central difference of phi.
inline bool check_convex_fn(const ConvexFn& fn, double t_lo = 0.05, double t_hi = 8.0,
                            int samples = 160) {
    if (!fn.phi || !fn.dphi || samples < 2) return false;
    const long double h = 1e-4L;
    long double prev = fn.phi(t_lo);
    for (int i = 1; i < samples; ++i) {
        const long double t = t_lo + (t_hi - t_lo) * i / (samples - 1);
        const long double v = fn.phi(t);
        if (!(v >= prev - 1e-12L)) return false;
        const long double tm = (t_lo + t) / 2;
        if (!(fn.phi(tm) <= (fn.phi(t_lo) + v) / 2 + 1e-9L)) return false;
        const long double fd = (fn.phi(t + h) - fn.phi(t - h)) / (2 * h);
        const long double d = fn.dphi(t);
        if (!(std::abs(fd - d) <= 1e-5L * (1 + std::abs(d)))) return false;
        prev = v;
    }
    return true;
}

/// Selects which distance functional is summed over a shell: squared
/// Euclidean distance, plain Euclidean distance, or a monotone convex
/// composition phi(distance).
class DistanceKind {
  public:
    enum class Tag { squared, linear, convex };

    static DistanceKind squared() { return DistanceKind(Tag::squared, {}); }
    static DistanceKind linear() { return DistanceKind(Tag::linear, {}); }
    static DistanceKind convex(ConvexFn fn) { return DistanceKind(Tag::convex, std::move(fn)); }

    Tag tag() const { return tag_; }

    const ConvexFn& fn() const {
        if (tag_ != Tag::convex) throw std::logic_error("DistanceKind: no ConvexFn attached");
        return fn_;
    }

    /// Slope of the per-point functional at distance r: 2r, 1, or phi'(r).
    double phi_prime(double r) const {
        switch (tag_) {
            case Tag::squared: return 2.0 * r;
            case Tag::linear: return 1.0;
            case Tag::convex: return static_cast<double>(fn_.dphi(r));
        }
        return 0.0;  // unreachable
    }

    std::string name() const {
        switch (tag_) {
            case Tag::squared: return "squared";
            case Tag::linear: return "linear";
            case Tag::convex: return "convex:" + fn_.label;
        }
        return {};
    }

  private:
    DistanceKind(Tag tag, ConvexFn fn) : tag_(tag), fn_(std::move(fn)) {}

    Tag tag_;
    ConvexFn fn_;
};

namespace detail {

// Squared distance from the (K, L) lattice point to the deep hole in chart
// (x, y). Writing u = K + L x, the point is (u / sqrt(y), L sqrt(y)).
template <class T>
T sq_dist_to_hole(T x, T y, IndexPair kl) {
    const T root_y = std::sqrt(y);
    const T dx = (T(kl.k) + T(kl.l) * x) / root_y - T(0.5);
    const T dy = T(kl.l) * root_y - T(0.5);
    return dx * dx + dy * dy;
}

template <class T>
T dist_to_hole(T x, T y, IndexPair kl) {
    return std::sqrt(sq_dist_to_hole(x, y, kl));
}

// Gradient of sq_dist_to_hole in (x, y):
//   d/dx = L (2u - sqrt(y)) / y
//   d/dy = -u^2/y^2 + u/(2 y^{3/2}) + L^2 - L/(2 sqrt(y))
template <class T>
Vec2T<T> grad_sq_dist_to_hole(T x, T y, IndexPair kl) {
    const T K = T(kl.k), L = T(kl.l);
    const T u = K + L * x;
    const T root_y = std::sqrt(y);
    const T gx = L * (2 * u - root_y) / y;
    const T gy = -u * u / (y * y) + u / (2 * y * root_y) + L * L - L / (2 * root_y);
    return {gx, gy};
}

template <class T>
T apply_kind(T dist, const DistanceKind& kind) {
    switch (kind.tag()) {
        case DistanceKind::Tag::squared: return dist * dist;
        case DistanceKind::Tag::linear: return dist;
        case DistanceKind::Tag::convex:
            return static_cast<T>(kind.fn().phi(static_cast<long double>(dist)));
    }
    return T(0);  // unreachable
}

}  // namespace detail

template <class T>
T f_squared_at(T x, T y, IndexPair kl) {
    T total = T(0);
    for (const IndexPair& q : quadruple_indices(kl)) total += detail::sq_dist_to_hole(x, y, q);
    return total;
}

template <class T>
T f_linear_at(T x, T y, IndexPair kl) {
    T total = T(0);
    for (const IndexPair& q : quadruple_indices(kl)) total += detail::dist_to_hole(x, y, q);
    return total;
}

template <class T>
T f_convex_at(T x, T y, IndexPair kl, const ConvexFn& fn) {
    T total = T(0);
    for (const IndexPair& q : quadruple_indices(kl))
        total += static_cast<T>(fn.phi(static_cast<long double>(detail::dist_to_hole(x, y, q))));
    return total;
}

template <class T>
T f_value_at(T x, T y, IndexPair kl, const DistanceKind& kind) {
    switch (kind.tag()) {
        case DistanceKind::Tag::squared: return f_squared_at(x, y, kl);
        case DistanceKind::Tag::linear: return f_linear_at(x, y, kl);
        case DistanceKind::Tag::convex: return f_convex_at(x, y, kl, kind.fn());
    }
    return T(0);  // unreachable
}

/// Total squared distance of the perturbed quadruple of (k, l) to the deep
/// hole.
inline double f_squared(const LatticeParams& p, IndexPair kl) {
    require_chart_point(p);
    return f_squared_at(p.x, p.y, kl);
}

/// Total Euclidean distance of the perturbed quadruple to the deep hole.
inline double f_linear(const LatticeParams& p, IndexPair kl) {
    require_chart_point(p);
    return f_linear_at(p.x, p.y, kl);
}

/// Total phi(distance) of the perturbed quadruple to the deep hole.
inline double f_convex(const LatticeParams& p, IndexPair kl, const ConvexFn& fn) {
    require_chart_point(p);
    return f_convex_at(p.x, p.y, kl, fn);
}

template <class T>
Vec2T<T> grad_f_squared_analytic_at(T x, T y, IndexPair kl) {
    Vec2T<T> g{};
    for (const IndexPair& q : quadruple_indices(kl)) g = g + detail::grad_sq_dist_to_hole(x, y, q);
    return g;
}

template <class T>
Vec2T<T> grad_f_linear_analytic_at(T x, T y, IndexPair kl) {
    Vec2T<T> g{};
    for (const IndexPair& q : quadruple_indices(kl)) {
        const T dist = detail::dist_to_hole(x, y, q);
        if (dist < T(1e-14))
            throw std::domain_error("grad_f_linear_analytic: quadruple point at the deep hole");
        const Vec2T<T> gsq = detail::grad_sq_dist_to_hole(x, y, q);
        g = g + (T(1) / (2 * dist)) * gsq;
    }
    return g;
}

template <class T>
Vec2T<T> grad_f_convex_analytic_at(T x, T y, IndexPair kl, const ConvexFn& fn) {
    Vec2T<T> g{};
    for (const IndexPair& q : quadruple_indices(kl)) {
        const T dist = detail::dist_to_hole(x, y, q);
        if (dist < T(1e-14))
            throw std::domain_error("grad_f_convex_analytic: quadruple point at the deep hole");
        const T slope = static_cast<T>(fn.dphi(static_cast<long double>(dist)));
        const Vec2T<T> gsq = detail::grad_sq_dist_to_hole(x, y, q);
        g = g + (slope / (2 * dist)) * gsq;
    }
    return g;
}

template <class T>
Vec2T<T> grad_f_value_at(T x, T y, IndexPair kl, const DistanceKind& kind) {
    switch (kind.tag()) {
        case DistanceKind::Tag::squared: return grad_f_squared_analytic_at(x, y, kl);
        case DistanceKind::Tag::linear: return grad_f_linear_analytic_at(x, y, kl);
        case DistanceKind::Tag::convex: return grad_f_convex_analytic_at(x, y, kl, kind.fn());
    }
    return {};  // unreachable
}

/// Closed-form gradient of f_squared; identically (0, 0) at (0, 1) for every
/// integer (k, l).
inline Vec2 grad_f_squared_analytic(const LatticeParams& p, IndexPair kl) {
    require_chart_point(p);
    return grad_f_squared_analytic_at(p.x, p.y, kl);
}

/// Closed-form gradient of f_linear; vanishes at (0, 1) for every integer
/// (k, l). Throws when a quadruple point degenerates onto the deep hole.
inline Vec2 grad_f_linear_analytic(const LatticeParams& p, IndexPair kl) {
    require_chart_point(p);
    return grad_f_linear_analytic_at(p.x, p.y, kl);
}

/// Squared-distance Hessian entries at the base point (0, 1), valid for real
/// (k, l):
///   h1 = 4 (1 - k + k^2 - l + l^2),  h12 = -1,  h3 = 3 - 4k + 4k^2 - 4l + 4l^2.
/// For all inputs h3 == h1 - 1.
template <class T>
SymMatrix2T<T> hessian_squared_entries(T k, T l) {
    const T h1 = 4 * (1 - k + k * k - l + l * l);
    const T h3 = 3 - 4 * k + 4 * k * k - 4 * l + 4 * l * l;
    return {h1, T(-1), h3};
}

inline SymMatrix2 hessian_squared_at_origin(IndexPair kl) {
    return hessian_squared_entries(static_cast<double>(kl.k), static_cast<double>(kl.l));
}

namespace detail {

template <class T>
struct LinearHessianParts {
    T denom;  // (1 - 2k + 2k^2 - 2l + 2l^2)^{3/2}
    T d;      // 1 - 2k + 2k^2 - 2l + 2l^2
    T p1, p2, p3;
};

template <class T>
LinearHessianParts<T> linear_hessian_parts(T k, T l) {
    const T k2 = k * k, k3 = k2 * k, k4 = k2 * k2;
    const T l2 = l * l, l3 = l2 * l, l4 = l2 * l2;
    const T d = 1 - 2 * k + 2 * k2 - 2 * l + 2 * l2;
    if (!(std::abs(d) >= T(1e-12)))
        throw std::domain_error("linear Hessian: singular denominator near (k, l) = (1/2, 1/2)");
    const T p1 = 1 - 3 * k + 7 * k2 - 8 * k3 + 4 * k4 - 3 * l + 7 * l2 - 8 * l3 + 4 * l4;
    const T p2 = -1 + k2 * (10 - 24 * l) + 6 * l - 14 * l2 + 8 * l3 + 8 * k3 * (-1 + 2 * l) -
                 2 * k * (1 - 12 * l2 + 8 * l3);
    const T p3 = 5 - 16 * k3 + 8 * k4 - 18 * l + 26 * l2 - 16 * l3 + 8 * l4 -
                 6 * k * (3 - 8 * l + 8 * l2) + k2 * (26 - 48 * l + 48 * l2);
    return {d * std::sqrt(d), d, p1, p2, p3};
}

}  // namespace detail

/// Euclidean-distance Hessian entries at the base point (0, 1), valid for
/// real (k, l) away from the singular point (1/2, 1/2). With
/// D = 1 - 2k + 2k^2 - 2l + 2l^2:
///   h1 = sqrt(2) P1 / D^{3/2},  h12 = P2 / (2 sqrt(2) D^{3/2}),
///   h3 = P3 / (2 sqrt(2) D^{3/2}).
template <class T>
SymMatrix2T<T> hessian_linear_entries(T k, T l) {
    const auto parts = detail::linear_hessian_parts(k, l);
    const T s2 = std::numbers::sqrt2_v<T>;
    return {s2 * parts.p1 / parts.denom, parts.p2 / (2 * s2 * parts.denom),
            parts.p3 / (2 * s2 * parts.denom)};
}

inline SymMatrix2 hessian_linear_at_origin(IndexPair kl) {
    return hessian_linear_entries(static_cast<double>(kl.k), static_cast<double>(kl.l));
}

/// Closed-form determinant of the Euclidean-distance Hessian at (0, 1):
/// (4 P1 P3 - P2^2) / (8 D^3). Minimum over the integers is 19/8.
inline double det_hessian_linear(IndexPair kl) {
    const auto parts =
        detail::linear_hessian_parts(static_cast<double>(kl.k), static_cast<double>(kl.l));
    const double d3 = parts.d * parts.d * parts.d;
    return (4.0 * parts.p1 * parts.p3 - parts.p2 * parts.p2) / (8.0 * d3);
}

/// Certified lower bound r phi'(r) |A_r| d^2 for the growth of the shell sum
/// under a perturbation at lattice distance d.
inline double gap_lower_bound(const Shell& shell, const DistanceKind& kind, double d) {
    if (!(d >= 0.0)) throw std::invalid_argument("gap_lower_bound: d must be >= 0");
    const double r = shell.radius();
    return r * kind.phi_prime(r) * static_cast<double>(shell.cardinality()) * d * d;
}

/// Shell-sum increase over the unperturbed value:
///   sum_{(k,l) in shell} [ g(|point(x,y,kl) - p|) - g(r) ]
/// with g selected by the kind. Accumulated termwise for cancellation-free
/// small values.
template <class T>
T shell_increase_at(T x, T y, const Shell& shell, const DistanceKind& kind) {
    const T r = std::sqrt(T(shell.four_r_squared)) / T(2);
    const T base = detail::apply_kind(r, kind);
    T total = T(0);
    for (const IndexPair& kl : shell.indices)
        total += detail::apply_kind(detail::dist_to_hole(x, y, kl), kind) - base;
    return total;
}

inline double shell_increase(const LatticeParams& p, const Shell& shell, const DistanceKind& kind) {
    require_chart_point(p);
    return shell_increase_at(p.x, p.y, shell, kind);
}

}  // namespace deephole
