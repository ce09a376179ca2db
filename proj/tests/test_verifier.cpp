#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gasket/potential.hpp"
#include "gasket/verifier.hpp"

using namespace gasket;
using namespace gasket::verify;

TEST_CASE("shape theorem checks for small masses") {
    for (double m : {3.0, 5.0, 9.0, 15.0, 100.0}) {
        auto r = check_shape_theorem(m);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
        CHECK(r.worst_error == 0.0);
    }
}

TEST_CASE("ball distribution checks for small radii") {
    for (std::int64_t n = 1; n <= 4; ++n) {
        auto r = check_ball_distribution(n);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
        CHECK(r.worst_error <= 1e-8);
    }
}

TEST_CASE("counting identity check") {
    auto r = check_second_wave_identity(50);
    CHECK(r.passed);
    CHECK(r.exact);
}

TEST_CASE("abelian check") {
    auto r = check_abelian(9.0);
    CHECK_MESSAGE(r.passed, r.details);
}

TEST_CASE("exact odometer from the Dirichlet re-solve") {
    auto u1 = exact_odometer_ball(1);
    REQUIRE(u1.size() == 1);
    CHECK(u1.at({0, 0}) == 2);

    auto u2 = exact_odometer_ball(2);
    CHECK(u2.at({0, 0}) == 10);
    for (Vertex v : sphere(1)) CHECK(u2.at(v) == 2);

    // Non-dyadic radius: exact values are positive on B_{n-1}.
    auto u3 = exact_odometer_ball(3);
    CHECK(u3.size() == ball(2).size());
    for (const auto& [v, value] : u3) CHECK(value > 0);
}

TEST_CASE("closed-form odometer check") {
    for (int k = 1; k <= 2; ++k) {
        auto r = check_closed_form_odometer(k);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
    }
}

TEST_CASE("appendix rule check, reduced size") {
    for (int k = 1; k <= 2; ++k) {
        auto r = check_appendix_rule(k, 10);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
        CHECK(r.exact);
    }
}

TEST_CASE("appendix rule is seed-deterministic") {
    auto a = check_appendix_rule(2, 5, 99);
    auto b = check_appendix_rule(2, 5, 99);
    CHECK(a.details == b.details);
    CHECK(a.passed == b.passed);
}

TEST_CASE("u~ properties check") {
    auto r = check_u_tilde_properties(6);
    CHECK_MESSAGE(r.passed, r.details);
    CHECK(r.exact);
}

TEST_CASE("harmonic uniformity check") {
    for (std::int64_t n : {2, 3}) {
        auto r = check_harmonic_uniformity(n);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
        CHECK(r.exact);
    }
}

TEST_CASE("cross-route check") {
    for (double m : {3.0, 9.0, 15.0}) {
        auto r = check_cross_route(m);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
    }
}

TEST_CASE("three-wave check") {
    for (std::int64_t n : {1, 2}) {
        auto r = check_three_waves(n);
        CHECK_MESSAGE(r.passed, r.name, ": ", r.details);
    }
}

TEST_CASE("conservation ledger summarizes the runs above") {
    auto r = conservation_summary();
    CHECK(r.passed);
    CHECK(r.worst_error <= 1e-12);
}

TEST_CASE("report serialization") {
    std::vector<CheckResult> rs;
    rs.push_back({"alpha", true, 0.0, true, "fine"});
    rs.push_back({"beta \"quoted\"", false, 0.5, false, "bad\nnews"});
    const std::string json = report_json(rs);
    CHECK(json.find("\"alpha\"") != std::string::npos);
    CHECK(json.find("\"passed\": false") != std::string::npos);
    CHECK(json.find("\\\"quoted\\\"") != std::string::npos);
    CHECK(json.find("bad\\nnews") != std::string::npos);
}
