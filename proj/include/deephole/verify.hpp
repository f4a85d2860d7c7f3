#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "deephole/functional.hpp"
#include "deephole/lattice.hpp"

namespace deephole {

/// Central-difference configuration. One optional Richardson extrapolation
/// level removes the leading h^2 truncation term.
struct FdConfig {
    double step = 1e-5;
    bool richardson = false;
};

inline void require_fd_config(const FdConfig& cfg) {
    if (!(cfg.step > 0.0 && cfg.step < 1e-2))
        throw std::invalid_argument("FdConfig: step must lie in (0, 1e-2)");
}

/// Central-difference gradient of a chart scalar fn at (x, y).
/// Error O(step^2), or O(step^4) with Richardson.
template <class T, class F>
Vec2T<T> fd_gradient_at(F&& fn, T x, T y, const FdConfig& cfg = {}) {
    require_fd_config(cfg);
    const T h = static_cast<T>(cfg.step);
    const T margin = cfg.richardson ? 2 * h : h;
    if (!(y - margin > T(0)))
        throw std::domain_error("fd_gradient: step leaves the chart (y - step <= 0)");

    const auto central = [&](T hh) -> Vec2T<T> {
        return {(fn(x + hh, y) - fn(x - hh, y)) / (2 * hh),
                (fn(x, y + hh) - fn(x, y - hh)) / (2 * hh)};
    };
    const Vec2T<T> d1 = central(h);
    if (!cfg.richardson) return d1;
    const Vec2T<T> d2 = central(2 * h);
    return {(4 * d1.x - d2.x) / T(3), (4 * d1.y - d2.y) / T(3)};
}

/// Symmetrized central-difference Hessian of a chart scalar fn at (x, y).
template <class T, class F>
SymMatrix2T<T> fd_hessian_at(F&& fn, T x, T y, const FdConfig& cfg = FdConfig{1e-4, false}) {
    require_fd_config(cfg);
    const T h = static_cast<T>(cfg.step);
    const T margin = (cfg.richardson ? T(4) : T(2)) * h;
    if (!(y - margin > T(0)))
        throw std::domain_error("fd_hessian: step leaves the chart (y - 2 step <= 0)");

    const auto hess = [&](T hh) -> SymMatrix2T<T> {
        const T f0 = fn(x, y);
        const T axx = (fn(x + hh, y) - 2 * f0 + fn(x - hh, y)) / (hh * hh);
        const T ayy = (fn(x, y + hh) - 2 * f0 + fn(x, y - hh)) / (hh * hh);
        const T axy = (fn(x + hh, y + hh) - fn(x + hh, y - hh) - fn(x - hh, y + hh) +
                       fn(x - hh, y - hh)) /
                      (4 * hh * hh);
        return {axx, axy, ayy};
    };
    const SymMatrix2T<T> m1 = hess(h);
    if (!cfg.richardson) return m1;
    const SymMatrix2T<T> m2 = hess(2 * h);
    return {(4 * m1.a11 - m2.a11) / T(3), (4 * m1.a12 - m2.a12) / T(3),
            (4 * m1.a22 - m2.a22) / T(3)};
}

inline Vec2 fd_gradient(const std::function<double(const LatticeParams&)>& fn,
                        const LatticeParams& at, const FdConfig& cfg = {}) {
    require_chart_point(at);
    return fd_gradient_at([&fn](double x, double y) { return fn(LatticeParams{x, y}); }, at.x,
                          at.y, cfg);
}

inline SymMatrix2 fd_hessian(const std::function<double(const LatticeParams&)>& fn,
                             const LatticeParams& at, const FdConfig& cfg = FdConfig{1e-4, false}) {
    require_chart_point(at);
    return fd_hessian_at([&fn](double x, double y) { return fn(LatticeParams{x, y}); }, at.x, at.y,
                         cfg);
}

/// Outcome of scanning the critical-point identity at (0, 1) over an integer
/// box. Violations are data, not errors.
struct CriticalPointReport {
    std::string kind;
    int k_range{};
    double max_analytic_norm{};
    double max_fd_norm{};
    std::vector<IndexPair> violations;
    bool pass{};

    friend bool operator==(const CriticalPointReport&, const CriticalPointReport&) = default;
};

/// True iff both the closed-form and the finite-difference gradient of the
/// selected functional vanish (norm <= 1e-8) at (0, 1) for every
/// (k, l) in [-k_range, k_range]^2. Runs in extended precision with
/// Richardson extrapolation so the FD noise floor stays well below the
/// threshold even at the corners of the box.
inline CriticalPointReport check_critical_point(const DistanceKind& kind, int k_range) {
    if (k_range < 1) throw std::invalid_argument("check_critical_point: k_range must be >= 1");

    constexpr double kTol = 1e-8;
    const FdConfig cfg{1e-5, true};
    CriticalPointReport report;
    report.kind = kind.name();
    report.k_range = k_range;

    for (std::int64_t k = -k_range; k <= k_range; ++k) {
        for (std::int64_t l = -k_range; l <= k_range; ++l) {
            const IndexPair kl{k, l};
            const auto ga = grad_f_value_at<long double>(0.0L, 1.0L, kl, kind);
            const auto gfd = fd_gradient_at<long double>(
                [&](long double x, long double y) { return f_value_at(x, y, kl, kind); }, 0.0L,
                1.0L, cfg);
            const double na = static_cast<double>(ga.norm());
            const double nfd = static_cast<double>(gfd.norm());
            report.max_analytic_norm = std::max(report.max_analytic_norm, na);
            report.max_fd_norm = std::max(report.max_fd_norm, nfd);
            if (na > kTol || nfd > kTol) report.violations.push_back(kl);
        }
    }
    report.pass = report.violations.empty();
    return report;
}

/// Result of minimizing the smaller Hessian eigenvalue over integer index
/// pairs. The grid scan is authoritative; the relaxed (real-valued) minimum
/// and the floor/ceil candidates around it are reported alongside, as is the
/// eigenvalue minimum on the scan-box boundary (evidence of growth outside).
struct SpectrumReport {
    std::string kind;
    int search_range{};
    double min_eigenvalue{};
    std::vector<IndexPair> argmin_pairs;
    bool growth_certified{};
    double boundary_min_eigenvalue{};
    double relaxed_min{};
    Vec2 relaxed_argmin{};
    std::vector<IndexPair> candidate_pairs;

    friend bool operator==(const SpectrumReport&, const SpectrumReport&) = default;
};

namespace detail {

inline double lambda_min_real(DistanceKind::Tag tag, double k, double l) {
    if (tag == DistanceKind::Tag::squared)
        return eig_sym2(hessian_squared_entries(k, l)).first;
    // Keep the search away from the pole of the linear entries.
    const double d = 1 - 2 * k + 2 * k * k - 2 * l + 2 * l * l;
    if (d < 1e-6) return std::numeric_limits<double>::infinity();
    return eig_sym2(hessian_linear_entries(k, l)).first;
}

// Plain Nelder-Mead on the plane; deterministic, no restarts.
template <class F>
std::pair<Vec2, double> nelder_mead_2d(F&& objective, Vec2 start, double scale, int iters) {
    struct Node {
        Vec2 p;
        double v;
    };
    std::array<Node, 3> simplex{Node{start, objective(start)},
                                Node{{start.x + scale, start.y}, 0.0},
                                Node{{start.x, start.y + scale}, 0.0}};
    simplex[1].v = objective(simplex[1].p);
    simplex[2].v = objective(simplex[2].p);

    for (int it = 0; it < iters; ++it) {
        std::sort(simplex.begin(), simplex.end(),
                  [](const Node& a, const Node& b) { return a.v < b.v; });
        if (simplex[2].v - simplex[0].v < 1e-14) break;
        const Vec2 centroid{(simplex[0].p.x + simplex[1].p.x) / 2,
                            (simplex[0].p.y + simplex[1].p.y) / 2};
        const auto shifted = [&](double t) -> Vec2 {
            return {centroid.x + t * (simplex[2].p.x - centroid.x),
                    centroid.y + t * (simplex[2].p.y - centroid.y)};
        };
        const Vec2 refl = shifted(-1.0);
        const double refl_v = objective(refl);
        if (refl_v < simplex[0].v) {
            const Vec2 expd = shifted(-2.0);
            const double expd_v = objective(expd);
            simplex[2] = expd_v < refl_v ? Node{expd, expd_v} : Node{refl, refl_v};
        } else if (refl_v < simplex[1].v) {
            simplex[2] = {refl, refl_v};
        } else {
            const Vec2 contr = shifted(0.5);
            const double contr_v = objective(contr);
            if (contr_v < simplex[2].v) {
                simplex[2] = {contr, contr_v};
            } else {
                for (int i = 1; i < 3; ++i) {
                    simplex[i].p = {(simplex[i].p.x + simplex[0].p.x) / 2,
                                    (simplex[i].p.y + simplex[0].p.y) / 2};
                    simplex[i].v = objective(simplex[i].p);
                }
            }
        }
    }
    std::sort(simplex.begin(), simplex.end(),
              [](const Node& a, const Node& b) { return a.v < b.v; });
    return {simplex[0].p, simplex[0].v};
}

}  // namespace detail

/// Scans (k, l) in [-range, range]^2 for the minimum of the smaller Hessian
/// eigenvalue. growth_certified records whether that minimum is strictly
/// positive. Only the squared and linear kinds carry closed-form Hessians.
inline SpectrumReport min_eig_over_integers(const DistanceKind& kind, int range) {
    if (kind.tag() == DistanceKind::Tag::convex)
        throw std::invalid_argument("min_eig_over_integers: closed-form Hessians exist only for "
                                    "the squared and linear kinds");
    if (range < 2) throw std::invalid_argument("min_eig_over_integers: range must be >= 2");

    SpectrumReport report;
    report.kind = kind.name();
    report.search_range = range;

    double best = std::numeric_limits<double>::infinity();
    double boundary_best = std::numeric_limits<double>::infinity();
    std::vector<IndexPair> argmin;
    for (std::int64_t k = -range; k <= range; ++k) {
        for (std::int64_t l = -range; l <= range; ++l) {
            const double lam = detail::lambda_min_real(kind.tag(), static_cast<double>(k),
                                                       static_cast<double>(l));
            if (lam < best - 1e-10) {
                best = lam;
                argmin.assign(1, IndexPair{k, l});
            } else if (std::abs(lam - best) <= 1e-10) {
                argmin.push_back({k, l});
            }
            const bool on_boundary = std::abs(k) == range || std::abs(l) == range;
            if (on_boundary) boundary_best = std::min(boundary_best, lam);
        }
    }
    report.min_eigenvalue = best;
    report.argmin_pairs = std::move(argmin);
    report.boundary_min_eigenvalue = boundary_best;
    report.growth_certified = best > 0.0;

    // Relaxed minimization over real (k, l): coarse grid, then a local polish
    // from the best cells. Used to derive the floor/ceil candidate pairs.
    const auto objective = [&](Vec2 p) { return detail::lambda_min_real(kind.tag(), p.x, p.y); };
    double relaxed = std::numeric_limits<double>::infinity();
    Vec2 relaxed_at{};
    std::vector<Vec2> starts;
    for (double k0 = -2.0; k0 <= 3.0; k0 += 0.25)
        for (double l0 = -2.0; l0 <= 3.0; l0 += 0.25) starts.push_back({k0, l0});
    std::sort(starts.begin(), starts.end(), [&](Vec2 a, Vec2 b) { return objective(a) < objective(b); });
    starts.resize(6);
    for (const Vec2 s : starts) {
        const auto [pos, val] = detail::nelder_mead_2d(objective, s, 0.1, 300);
        if (val < relaxed) {
            relaxed = val;
            relaxed_at = pos;
        }
    }
    report.relaxed_min = relaxed;
    report.relaxed_argmin = relaxed_at;
    for (const double kc : {std::floor(relaxed_at.x), std::ceil(relaxed_at.x)})
        for (const double lc : {std::floor(relaxed_at.y), std::ceil(relaxed_at.y)}) {
            const IndexPair cand{static_cast<std::int64_t>(kc), static_cast<std::int64_t>(lc)};
            if (std::find(report.candidate_pairs.begin(), report.candidate_pairs.end(), cand) ==
                report.candidate_pairs.end())
                report.candidate_pairs.push_back(cand);
        }
    std::sort(report.candidate_pairs.begin(), report.candidate_pairs.end());
    return report;
}

/// A chart point near (0, 1) together with its cached lattice distance to
/// the square lattice.
struct PerturbationSample {
    LatticeParams params;
    double d{};

    friend bool operator==(const PerturbationSample&, const PerturbationSample&) = default;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform draw on [-1, 1] that is bit-stable across platforms.
inline double symmetric_unit(std::uint64_t& state) {
    return static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-52 - 1.0;
}

}  // namespace detail

/// n chart points (scale u, 1 + scale w) with u, w independent uniform on
/// [-1, 1]. Each sample derives its own stream from (seed, index), so any
/// partitioning of the work reproduces the same values.
inline std::vector<PerturbationSample> sample_perturbations(std::size_t n, double scale,
                                                            std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_perturbations: n must be >= 1");
    if (!(scale > 0.0 && scale <= 0.05))
        throw std::invalid_argument("sample_perturbations: scale must lie in (0, 0.05]");

    const LatticeParams square{0.0, 1.0};
    std::vector<PerturbationSample> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t stream = seed ^ (0x9e3779b97f4a7c15ULL * (i + 1));
        const double u = detail::symmetric_unit(stream);
        const double w = detail::symmetric_unit(stream);
        const LatticeParams p{scale * u, 1.0 + scale * w};
        out.push_back({p, lattice_distance(p, square)});
    }
    return out;
}

/// Per-shell summary of Monte-Carlo certification. Certification passes when
/// failures == 0 and min_ratio > 0; min_ratio >= 1 additionally means the
/// bound holds with constant one, which is recorded but not gated on.
/// Samples with d == 0 contribute no ratio; with no positive-d sample at all
/// both ratios stay at the +infinity sentinel.
struct CertReport {
    std::int64_t shell_key{};
    std::string kind;
    std::int64_t sample_count{};
    double min_ratio{std::numeric_limits<double>::infinity()};
    double max_ratio{std::numeric_limits<double>::infinity()};
    std::int64_t failures{};
    double d_min{};
    double d_max{};
    std::int64_t zero_d_samples{};
    bool positivity_pass{};
    bool unit_constant_pass{};

    friend bool operator==(const CertReport&, const CertReport&) = default;
};

/// For each sample computes the shell-sum increase and its ratio against the
/// certified lower bound. The per-sample work is distributed over `workers`
/// threads; reduction happens in sample order, so the report is identical
/// for every worker count.
inline CertReport certify_inequality(const Shell& shell,
                                     std::span<const PerturbationSample> samples,
                                     const DistanceKind& kind, unsigned workers = 1) {
    if (samples.empty()) throw std::invalid_argument("certify_inequality: empty sample list");
    for (const auto& s : samples) {  // validate before any thread spawns
        require_chart_point(s.params);
        if (!(s.d >= 0.0))
            throw std::invalid_argument("certify_inequality: sample distance must be >= 0");
    }

    struct Row {
        double lhs{};
        double ratio{};
        bool has_ratio{};
    };
    const std::size_t n = samples.size();
    std::vector<Row> rows(n);
    const auto eval_range = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& s = samples[i];
            const double lhs = shell_increase_at(s.params.x, s.params.y, shell, kind);
            const double bound = gap_lower_bound(shell, kind, s.d);
            rows[i] = {lhs, bound > 0.0 ? lhs / bound : 0.0, bound > 0.0};
        }
    };

    if (workers <= 1) {
        eval_range(0, n);
    } else {
        const std::size_t chunk = (n + workers - 1) / workers;
        std::vector<std::thread> pool;
        for (std::size_t lo = 0; lo < n; lo += chunk)
            pool.emplace_back(eval_range, lo, std::min(lo + chunk, n));
        for (auto& t : pool) t.join();
    }

    CertReport report;
    report.shell_key = shell.four_r_squared;
    report.kind = kind.name();
    report.sample_count = static_cast<std::int64_t>(n);
    report.d_min = samples[0].d;
    report.d_max = samples[0].d;
    bool any_ratio = false;
    for (std::size_t i = 0; i < n; ++i) {
        report.d_min = std::min(report.d_min, samples[i].d);
        report.d_max = std::max(report.d_max, samples[i].d);
        if (rows[i].lhs < 0.0) ++report.failures;
        if (!rows[i].has_ratio) {
            ++report.zero_d_samples;
            continue;
        }
        if (!any_ratio) {
            report.min_ratio = rows[i].ratio;
            report.max_ratio = rows[i].ratio;
            any_ratio = true;
        } else {
            report.min_ratio = std::min(report.min_ratio, rows[i].ratio);
            report.max_ratio = std::max(report.max_ratio, rows[i].ratio);
        }
    }
    report.positivity_pass = report.failures == 0 && report.min_ratio > 0.0;
    report.unit_constant_pass = report.min_ratio >= 1.0;
    return report;
}

/// Shell-sum increase along params(t) = (t dir_x, 1 + t dir_y) for
/// geometrically shrinking t. Returns (d, increase) pairs; the log-log slope
/// over the tail approaches 2 because the gradient vanishes and the Hessian
/// is positive definite at (0, 1).
inline std::vector<std::pair<double, double>> quadratic_scaling_probe(
    const Shell& shell, Vec2 direction, const DistanceKind& kind, int steps, double t0 = 0.02,
    double shrink = 0.5) {
    if (direction.norm_sq() == 0.0)
        throw std::invalid_argument("quadratic_scaling_probe: direction must be nonzero");
    if (steps < 4) throw std::invalid_argument("quadratic_scaling_probe: steps must be >= 4");
    if (!(t0 > 0.0) || !(shrink > 0.0 && shrink < 1.0))
        throw std::invalid_argument("quadratic_scaling_probe: need t0 > 0 and shrink in (0, 1)");
    if (!(1.0 + t0 * direction.y > 0.0))
        throw std::invalid_argument("quadratic_scaling_probe: first step leaves the chart");

    const LatticeParams square{0.0, 1.0};
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(steps));
    double t = t0;
    for (int i = 0; i < steps; ++i, t *= shrink) {
        const LatticeParams p{t * direction.x, 1.0 + t * direction.y};
        out.emplace_back(lattice_distance(p, square), shell_increase(p, shell, kind));
    }
    return out;
}

/// Least-squares slope of log(increase) against log(d) over the last `tail`
/// probe points. NaN when any tail value is nonpositive.
inline double fitted_loglog_slope(std::span<const std::pair<double, double>> points,
                                  std::size_t tail = 3) {
    if (points.size() < tail || tail < 2)
        throw std::invalid_argument("fitted_loglog_slope: need at least `tail` >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const std::size_t lo = points.size() - tail;
    for (std::size_t i = lo; i < points.size(); ++i) {
        const auto [d, lhs] = points[i];
        if (!(d > 0.0) || !(lhs > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        const double lx = std::log(d), ly = std::log(lhs);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double m = static_cast<double>(tail);
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace deephole
