// deephole — verification front end for the square-lattice deep-hole
// library: shell enumeration, critical-point and Hessian checks, integer
// spectral minimization, Monte-Carlo inequality certification, scaling
// probes, and chart sweeps.
//
// Exit codes: 0 all checks passed, 1 a verification check failed,
// 2 invalid input or configuration.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "deephole/deephole.hpp"

namespace {

using namespace deephole;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitBadInput = 2;

struct CommandOutput {
    std::string text;
    std::string csv;
    json config;
    json results;
    bool pass = true;
};

struct CommonOptions {
    std::string format = "text";
    std::string output_path;
    std::string kind = "squared";
    std::string phi = "exp";
    std::uint64_t seed = 0;
    bool seed_from_flag = false;
    unsigned threads = 1;
};

DistanceKind resolve_kind(const CommonOptions& opt) {
    if (opt.kind == "squared") return DistanceKind::squared();
    if (opt.kind == "linear") return DistanceKind::linear();
    if (opt.kind == "convex") {
        auto fn = convex_by_label(opt.phi);
        if (!fn)
            throw std::invalid_argument("unknown --phi label '" + opt.phi +
                                        "' (catalog: square, linear, exp, pow3)");
        return DistanceKind::convex(*std::move(fn));
    }
    throw std::invalid_argument("unknown --kind '" + opt.kind +
                                "' (expected squared, linear, or convex)");
}

// Precedence: flag > DEEPHOLE_SEED > 0.
std::uint64_t resolve_seed(const CommonOptions& opt) {
    if (opt.seed_from_flag) return opt.seed;
    if (const char* env = std::getenv("DEEPHOLE_SEED")) {
        const std::string value(env);
        if (value.empty() || value.find_first_not_of("0123456789") != std::string::npos)
            throw std::invalid_argument("DEEPHOLE_SEED is not an unsigned integer");
        return std::stoull(value);
    }
    return 0;
}

Shell resolve_shell(std::int64_t key) {
    Shell shell = shell_by_key(key);
    if (shell.indices.empty())
        throw std::invalid_argument("no shell has 4r^2 = " + std::to_string(key) +
                                    " (the key must be a sum of two odd squares)");
    return shell;
}

Vec2 parse_direction(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("--direction expects 'dx,dy'");
    std::size_t a = 0, b = 0;
    const std::string left = text.substr(0, comma), right = text.substr(comma + 1);
    const double dx = std::stod(left, &a);
    const double dy = std::stod(right, &b);
    if (a != left.size() || b != right.size())
        throw std::invalid_argument("--direction expects 'dx,dy'");
    return {dx, dy};
}

// ---------------------------------------------------------------------------
// command handlers

CommandOutput run_shells(double r_max) {
    const auto shells = enumerate_shells(r_max);
    CommandOutput out;
    out.config = {{"r_max", r_max}};

    std::ostringstream text, csv;
    csv << "four_r_squared,r,cardinality\n";
    text << "shells with radius <= " << r_max << ":\n";
    json rows = json::array();
    for (const auto& s : shells) {
        csv << s.four_r_squared << ',' << csv_number(s.radius()) << ',' << s.cardinality()
            << '\n';
        text << "  4r^2 = " << s.four_r_squared << "  r = " << s.radius()
             << "  |A_r| = " << s.cardinality() << '\n';
        rows.push_back({{"four_r_squared", s.four_r_squared},
                        {"r", s.radius()},
                        {"cardinality", s.cardinality()}});
    }
    out.text = text.str();
    out.csv = csv.str();
    out.results = rows;
    return out;
}

CommandOutput run_gradients(const CommonOptions& opt, int k_range) {
    const auto report = check_critical_point(resolve_kind(opt), k_range);
    CommandOutput out;
    out.pass = report.pass;
    out.config = {{"kind", report.kind}, {"k_range", k_range}};
    out.results = report;

    std::ostringstream text;
    if (report.pass)
        text << "all analytic and finite-difference gradients <= 1e-8 at (0,1) for |k|,|l| <= "
             << k_range << " (" << report.kind << ")\n";
    else
        text << report.violations.size() << " index pairs violate the gradient threshold\n";
    text << "max analytic norm = " << report.max_analytic_norm
         << ", max fd norm = " << report.max_fd_norm << '\n';
    out.text = text.str();

    std::ostringstream csv;
    csv << "kind,k_range,max_analytic_norm,max_fd_norm,violations,pass\n"
        << report.kind << ',' << k_range << ',' << csv_number(report.max_analytic_norm) << ','
        << csv_number(report.max_fd_norm) << ',' << report.violations.size() << ','
        << (report.pass ? 1 : 0) << '\n';
    out.csv = csv.str();
    return out;
}

struct HessianCheck {
    std::string kind;
    double max_abs_deviation = 0.0;
    bool identity_exact = true;  // h3 == h1 - 1, squared kind only
    bool pass = true;
};

HessianCheck hessian_check_one(DistanceKind::Tag tag, int k_range, double tol) {
    HessianCheck check;
    check.kind = tag == DistanceKind::Tag::squared ? "squared" : "linear";
    for (std::int64_t k = -k_range; k <= k_range; ++k) {
        for (std::int64_t l = -k_range; l <= k_range; ++l) {
            const IndexPair kl{k, l};
            const SymMatrix2 closed = tag == DistanceKind::Tag::squared
                                          ? hessian_squared_at_origin(kl)
                                          : hessian_linear_at_origin(kl);
            const auto fd = fd_hessian_at<long double>(
                [&](long double x, long double y) {
                    return tag == DistanceKind::Tag::squared ? f_squared_at(x, y, kl)
                                                             : f_linear_at(x, y, kl);
                },
                0.0L, 1.0L, FdConfig{1e-4, false});
            const double dev = std::max(
                {std::abs(static_cast<double>(fd.a11) - closed.a11),
                 std::abs(static_cast<double>(fd.a12) - closed.a12),
                 std::abs(static_cast<double>(fd.a22) - closed.a22)});
            check.max_abs_deviation = std::max(check.max_abs_deviation, dev);
            if (tag == DistanceKind::Tag::squared && closed.a22 != closed.a11 - 1.0)
                check.identity_exact = false;
        }
    }
    check.pass = check.max_abs_deviation <= tol && check.identity_exact;
    return check;
}

CommandOutput run_hessian(const CommonOptions& opt, int k_range, double tol) {
    std::vector<HessianCheck> checks;
    if (opt.kind == "both" || opt.kind == "squared")
        checks.push_back(hessian_check_one(DistanceKind::Tag::squared, k_range, tol));
    if (opt.kind == "both" || opt.kind == "linear")
        checks.push_back(hessian_check_one(DistanceKind::Tag::linear, k_range, tol));
    if (checks.empty())
        throw std::invalid_argument("hessian: --kind must be squared, linear, or both");

    CommandOutput out;
    out.config = {{"kind", opt.kind}, {"k_range", k_range}, {"tol", tol}};
    std::ostringstream text, csv;
    csv << "kind,k_range,tol,max_abs_deviation,identity_h3_h1,pass\n";
    json rows = json::array();
    for (const auto& c : checks) {
        out.pass = out.pass && c.pass;
        text << c.kind << ": closed form vs finite differences over [-" << k_range << ','
             << k_range << "]^2, max |dev| = " << c.max_abs_deviation
             << (c.pass ? "  (ok)" : "  (EXCEEDS TOLERANCE)") << '\n';
        if (c.kind == "squared")
            text << "squared: h3 == h1 - 1 " << (c.identity_exact ? "exactly" : "VIOLATED")
                 << '\n';
        csv << c.kind << ',' << k_range << ',' << csv_number(tol) << ','
            << csv_number(c.max_abs_deviation) << ',' << (c.identity_exact ? 1 : 0) << ','
            << (c.pass ? 1 : 0) << '\n';
        rows.push_back({{"kind", c.kind},
                        {"max_abs_deviation", c.max_abs_deviation},
                        {"identity_h3_eq_h1_minus_1", c.identity_exact},
                        {"pass", c.pass}});
    }
    out.text = text.str();
    out.csv = csv.str();
    out.results = rows;
    return out;
}

CommandOutput run_spectrum(const CommonOptions& opt, int k_range) {
    if (opt.kind != "squared" && opt.kind != "linear")
        throw std::invalid_argument("spectrum: --kind must be squared or linear");
    const auto kind = opt.kind == "squared" ? DistanceKind::squared() : DistanceKind::linear();
    const auto report = min_eig_over_integers(kind, k_range);

    CommandOutput out;
    out.pass = report.growth_certified;
    out.config = {{"kind", report.kind}, {"k_range", k_range}};
    out.results = report;

    std::ostringstream text;
    text << "min eigenvalue over [-" << k_range << ',' << k_range << "]^2 ("
         << report.kind << ") = " << csv_number(report.min_eigenvalue) << '\n'
         << "attained at:";
    for (const auto& kl : report.argmin_pairs) text << " (" << kl.k << ',' << kl.l << ')';
    text << '\n'
         << "scan-box boundary minimum = " << csv_number(report.boundary_min_eigenvalue) << '\n'
         << "relaxed (real) minimum = " << csv_number(report.relaxed_min) << " at ("
         << report.relaxed_argmin.x << ',' << report.relaxed_argmin.y << ")\n"
         << "growth certified: " << (report.growth_certified ? "yes" : "NO") << '\n';
    out.text = text.str();

    std::ostringstream csv;
    csv << "kind,search_range,min_eigenvalue,argmin_count,boundary_min,relaxed_min,growth\n"
        << report.kind << ',' << k_range << ',' << csv_number(report.min_eigenvalue) << ','
        << report.argmin_pairs.size() << ',' << csv_number(report.boundary_min_eigenvalue) << ','
        << csv_number(report.relaxed_min) << ',' << (report.growth_certified ? 1 : 0) << '\n';
    out.csv = csv.str();
    return out;
}

CommandOutput run_certify(const CommonOptions& opt, std::int64_t shell_key, std::size_t samples,
                          double scale) {
    const Shell shell = resolve_shell(shell_key);
    const auto kind = resolve_kind(opt);
    const std::uint64_t seed = resolve_seed(opt);
    const auto drawn = sample_perturbations(samples, scale, seed);
    const auto report = certify_inequality(shell, drawn, kind, opt.threads);

    CommandOutput out;
    out.pass = report.positivity_pass;
    out.config = {{"shell", shell_key}, {"kind", report.kind},     {"samples", samples},
                  {"scale", scale},     {"seed", seed},            {"threads", opt.threads}};
    out.results = report;

    std::ostringstream text;
    text << "shell 4r^2 = " << shell_key << " (" << shell.cardinality() << " points), kind "
         << report.kind << ", " << samples << " samples, scale " << scale << ", seed " << seed
         << '\n'
         << "failures = " << report.failures << ", ratio range = ["
         << csv_number(report.min_ratio) << ", " << csv_number(report.max_ratio) << "]\n"
         << "positivity: " << (report.positivity_pass ? "pass" : "FAIL")
         << "; bound with constant 1: " << (report.unit_constant_pass ? "holds" : "not attained")
         << " (informational)\n";
    out.text = text.str();

    std::ostringstream csv;
    csv << "shell_key,kind,sample_count,failures,min_ratio,max_ratio,d_min,d_max,positivity\n"
        << report.shell_key << ',' << report.kind << ',' << report.sample_count << ','
        << report.failures << ',' << csv_number(report.min_ratio) << ','
        << csv_number(report.max_ratio) << ',' << csv_number(report.d_min) << ','
        << csv_number(report.d_max) << ',' << (report.positivity_pass ? 1 : 0) << '\n';
    out.csv = csv.str();
    return out;
}

CommandOutput run_probe(const CommonOptions& opt, std::int64_t shell_key,
                        const std::string& direction_text, int steps) {
    const Shell shell = resolve_shell(shell_key);
    const Vec2 direction = parse_direction(direction_text);
    const auto kind = resolve_kind(opt);
    const auto points = quadratic_scaling_probe(shell, direction, kind, steps);
    const double slope = fitted_loglog_slope(points);
    const bool slope_ok = slope >= 1.95 && slope <= 2.05;

    CommandOutput out;
    out.pass = slope_ok;
    out.config = {{"shell", shell_key},
                  {"kind", kind.name()},
                  {"direction", {direction.x, direction.y}},
                  {"steps", steps}};
    out.results = {{"points", points}, {"slope", slope}, {"slope_in_band", slope_ok}};

    std::ostringstream text, csv;
    csv << "d,lhs\n";
    for (const auto& [d, lhs] : points) {
        csv << csv_number(d) << ',' << csv_number(lhs) << '\n';
        text << "d = " << csv_number(d) << "  lhs = " << csv_number(lhs) << '\n';
    }
    text << "log-log slope (last 3 points) = " << slope << (slope_ok ? "  (ok)" : "  (OUT OF BAND)")
         << '\n';
    out.text = text.str();
    out.csv = csv.str();
    return out;
}

CommandOutput run_sweep(const CommonOptions& opt, std::int64_t shell_key, double x_min,
                        double x_max, double y_min, double y_max, int nx, int ny) {
    if (nx < 2 || ny < 2 || !(x_min <= x_max) || !(y_min <= y_max))
        throw std::invalid_argument("sweep: degenerate grid");
    if (x_min < -0.5 || x_max > 0.5 || y_min < 0.87 || y_max > 1.5)
        throw std::invalid_argument(
            "sweep: grid must stay within |x| <= 0.5, y in [0.87, 1.5]");
    const Shell shell = resolve_shell(shell_key);
    const auto kind = resolve_kind(opt);

    CommandOutput out;
    out.config = {{"shell", shell_key}, {"kind", kind.name()}, {"x_min", x_min},
                  {"x_max", x_max},     {"y_min", y_min},      {"y_max", y_max},
                  {"nx", nx},           {"ny", ny}};

    std::ostringstream csv;
    csv << "x,y,lhs\n";
    double best = std::numeric_limits<double>::infinity();
    Vec2 best_at{};
    for (int i = 0; i < nx; ++i) {
        const double x = x_min + (x_max - x_min) * i / (nx - 1);
        for (int j = 0; j < ny; ++j) {
            const double y = y_min + (y_max - y_min) * j / (ny - 1);
            const double lhs = shell_increase({x, y}, shell, kind);
            csv << csv_number(x) << ',' << csv_number(y) << ',' << csv_number(lhs) << '\n';
            if (lhs < best) {
                best = lhs;
                best_at = {x, y};
            }
        }
    }
    out.csv = csv.str();
    out.results = {{"rows", nx * ny}, {"min_lhs", best}, {"min_at", {best_at.x, best_at.y}}};

    std::ostringstream text;
    text << nx << 'x' << ny << " grid on [" << x_min << ',' << x_max << "] x [" << y_min << ','
         << y_max << "], shell 4r^2 = " << shell_key << ", kind " << kind.name() << '\n'
         << "grid minimum " << csv_number(best) << " at (" << best_at.x << ',' << best_at.y
         << ")\n";
    out.text = text.str();
    return out;
}

int emit(const CommandOutput& out, const std::string& command, const CommonOptions& opt) {
    std::string payload;
    if (opt.format == "json") {
        const json envelope = {{"command", command},
                               {"config", out.config},
                               {"results", out.results},
                               {"verdict", out.pass ? "pass" : "fail"}};
        payload = envelope.dump(2) + "\n";
    } else if (opt.format == "csv") {
        payload = out.csv.empty() ? out.text : out.csv;
    } else if (opt.format == "text") {
        payload = out.text;
        payload += out.pass ? "verdict: pass\n" : "verdict: fail\n";
    } else {
        throw std::invalid_argument("unknown --format '" + opt.format +
                                    "' (expected text, csv, or json)");
    }

    if (opt.output_path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream file(opt.output_path, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open output path " + opt.output_path);
        file << payload;
        if (!file.good()) throw std::runtime_error("write failed for " + opt.output_path);
    }
    return out.pass ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"square-lattice deep-hole verification suite"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonOptions opt;
    app.add_option("--format", opt.format, "output format: text, csv, or json")
        ->capture_default_str();
    app.add_option("-o,--output", opt.output_path, "write the report to this path");
    auto* seed_opt =
        app.add_option("--seed", opt.seed,
                       "sampling seed (precedence: this flag, then DEEPHOLE_SEED, then 0)");
    app.add_option("--threads", opt.threads, "worker threads for per-sample certification")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();

    double r_max = 1.6;
    int grad_range = 50;
    int hess_range = 10;
    int spec_range = 20;
    double tol = 1e-4;
    std::string hess_kind = "both";
    std::int64_t shell_key = 2;
    std::size_t samples = 1000;
    double scale = 0.01;
    std::string direction_text = "1,0";
    int steps = 8;
    double x_min = -0.5, x_max = 0.5, y_min = 0.87, y_max = 1.5;
    int nx = 101, ny = 101;

    auto* cmd_shells = app.add_subcommand("shells", "enumerate shells around the deep hole");
    cmd_shells->add_option("--r-max", r_max, "largest shell radius")->required();

    auto* cmd_gradients =
        app.add_subcommand("gradients", "verify the critical-point identity at (0,1)");
    cmd_gradients->add_option("--kind", opt.kind, "squared, linear, or convex")
        ->capture_default_str();
    cmd_gradients->add_option("--phi", opt.phi, "convex catalog label")->capture_default_str();
    cmd_gradients->add_option("--k-range", grad_range, "index box half width")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();

    auto* cmd_hessian = app.add_subcommand(
        "hessian", "compare closed-form Hessians with finite differences at (0,1)");
    cmd_hessian->add_option("--kind", hess_kind, "squared, linear, or both")
        ->capture_default_str();
    cmd_hessian->add_option("--k-range", hess_range, "index box half width")
        ->capture_default_str();
    cmd_hessian->add_option("--tol", tol, "entrywise deviation tolerance")
        ->capture_default_str();

    auto* cmd_spectrum =
        app.add_subcommand("spectrum", "minimize the smaller Hessian eigenvalue over integers");
    cmd_spectrum->add_option("--kind", opt.kind, "squared or linear")->capture_default_str();
    cmd_spectrum->add_option("--k-range", spec_range, "scan box half width")
        ->capture_default_str();

    auto* cmd_certify = app.add_subcommand(
        "certify", "Monte-Carlo certification of the shell growth inequality");
    cmd_certify->add_option("--shell", shell_key, "exact shell key 4r^2")->required();
    cmd_certify->add_option("--kind", opt.kind, "squared, linear, or convex")
        ->capture_default_str();
    cmd_certify->add_option("--phi", opt.phi, "convex catalog label")->capture_default_str();
    cmd_certify->add_option("--samples", samples, "number of perturbation samples")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd_certify->add_option("--scale", scale, "perturbation scale, in (0, 0.05]")
        ->capture_default_str();

    auto* cmd_probe =
        app.add_subcommand("probe", "quadratic scaling probe along a chart direction");
    cmd_probe->add_option("--shell", shell_key, "exact shell key 4r^2")->required();
    cmd_probe->add_option("--kind", opt.kind, "squared, linear, or convex")
        ->capture_default_str();
    cmd_probe->add_option("--phi", opt.phi, "convex catalog label")->capture_default_str();
    cmd_probe->add_option("--direction", direction_text, "chart direction 'dx,dy'")
        ->capture_default_str();
    cmd_probe->add_option("--steps", steps, "number of shrinking steps")->capture_default_str();

    auto* cmd_sweep = app.add_subcommand("sweep", "grid sweep of the shell sum over the chart");
    cmd_sweep->add_option("--shell", shell_key, "exact shell key 4r^2")->required();
    cmd_sweep->add_option("--kind", opt.kind, "squared, linear, or convex")
        ->capture_default_str();
    cmd_sweep->add_option("--phi", opt.phi, "convex catalog label")->capture_default_str();
    cmd_sweep->add_option("--x-min", x_min)->capture_default_str();
    cmd_sweep->add_option("--x-max", x_max)->capture_default_str();
    cmd_sweep->add_option("--y-min", y_min)->capture_default_str();
    cmd_sweep->add_option("--y-max", y_max)->capture_default_str();
    cmd_sweep->add_option("--nx", nx, "grid points along x")->capture_default_str();
    cmd_sweep->add_option("--ny", ny, "grid points along y")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse error
        return code == 0 ? kExitOk : kExitBadInput;
    }
    opt.seed_from_flag = seed_opt->count() > 0;

    try {
        CommandOutput out;
        std::string command;
        if (cmd_shells->parsed()) {
            command = "shells";
            out = run_shells(r_max);
        } else if (cmd_gradients->parsed()) {
            command = "gradients";
            out = run_gradients(opt, grad_range);
        } else if (cmd_hessian->parsed()) {
            command = "hessian";
            opt.kind = hess_kind;
            out = run_hessian(opt, hess_range, tol);
        } else if (cmd_spectrum->parsed()) {
            command = "spectrum";
            out = run_spectrum(opt, spec_range);
        } else if (cmd_certify->parsed()) {
            command = "certify";
            out = run_certify(opt, shell_key, samples, scale);
        } else if (cmd_probe->parsed()) {
            command = "probe";
            out = run_probe(opt, shell_key, direction_text, steps);
        } else if (cmd_sweep->parsed()) {
            command = "sweep";
            out = run_sweep(opt, shell_key, x_min, x_max, y_min, y_max, nx, ny);
        }
        return emit(out, command, opt);
    } catch (const std::exception& e) {
        std::cerr << "deephole: " << e.what() << '\n';
        return kExitBadInput;
    }
}
