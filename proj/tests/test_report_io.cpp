#include <catch2/catch_amalgamated.hpp>

#include <limits>

#include "deephole/report_io.hpp"

using namespace deephole;

TEST_CASE("JSON round trips preserve reports exactly") {
    SECTION("certification report") {
        const auto samples = sample_perturbations(100, 0.01, 7);
        const auto report = certify_inequality(shell_by_key(10), samples, DistanceKind::linear());
        const nlohmann::json j = report;
        CHECK(nlohmann::json::parse(j.dump()).get<CertReport>() == report);
    }
    SECTION("certification report with the infinity sentinel") {
        const std::vector<PerturbationSample> unperturbed{{{0.0, 1.0}, 0.0}};
        const auto report =
            certify_inequality(shell_by_key(2), unperturbed, DistanceKind::squared());
        REQUIRE(std::isinf(report.min_ratio));
        const auto text = nlohmann::json(report).dump();
        CHECK(nlohmann::json::parse(text).get<CertReport>() == report);
    }
    SECTION("spectrum report") {
        const auto report = min_eig_over_integers(DistanceKind::linear(), 5);
        const auto text = nlohmann::json(report).dump();
        CHECK(nlohmann::json::parse(text).get<SpectrumReport>() == report);
    }
    SECTION("critical point report") {
        const auto report = check_critical_point(DistanceKind::squared(), 3);
        const auto text = nlohmann::json(report).dump();
        CHECK(nlohmann::json::parse(text).get<CriticalPointReport>() == report);
    }
    SECTION("shells and samples") {
        const Shell shell = shell_by_key(50);
        CHECK(nlohmann::json::parse(nlohmann::json(shell).dump()).get<Shell>() == shell);
        const auto samples = sample_perturbations(5, 0.01, 3);
        const nlohmann::json j = samples;
        CHECK(j.get<std::vector<PerturbationSample>>() == samples);
    }
}

TEST_CASE("sentinel encoding") {
    CHECK(json_real(std::numeric_limits<double>::infinity()) == "inf");
    CHECK(json_real(-std::numeric_limits<double>::infinity()) == "-inf");
    CHECK(json_real(1.5) == nlohmann::json(1.5));
    CHECK(real_from_json(nlohmann::json("inf")) == std::numeric_limits<double>::infinity());
    CHECK(real_from_json(nlohmann::json(0.25)) == 0.25);
    CHECK_THROWS_AS(real_from_json(nlohmann::json("wide")), std::invalid_argument);
}

TEST_CASE("CSV cell format carries 17 significant digits") {
    CHECK(csv_number(0.1) == "0.10000000000000001");
    CHECK(csv_number(2.0) == "2");
    CHECK(csv_number(1.0 / 3.0) == "0.33333333333333331");
    // value -> text -> value is lossless
    for (const double v : {0.7071067811865476, 1.1957055501486845, 3.5e-12, 123456.789}) {
        CHECK(std::stod(csv_number(v)) == v);
    }
}
