#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "gasket/graph.hpp"
#include "gasket/potential.hpp"
#include "gasket/sandpile.hpp"

using namespace gasket;
using namespace gasket::sandpile;

namespace {

StabilizeResult run(double mass, Schedule schedule = Schedule::parallel, double eps = 1e-12) {
    return stabilize(SandState::point_mass(mass), HeightFunction::uniform(1.0),
                     StabilizeOptions{schedule, eps, 10'000'000});
}

// Discrete Laplacian of an odometer at v (finitely supported, zero outside).
double lap(const Odometer& u, Vertex v) {
    double sum = 0.0;
    for (Vertex w : neighbors(v)) sum += u.at(w);
    return sum / 4.0 - u.at(v);
}

bool sup_difference_below(const Odometer& a, const Odometer& b, double bound) {
    for (const auto& [v, u] : a.values())
        if (std::abs(u - b.at(v)) > bound) return false;
    for (const auto& [v, u] : b.values())
        if (std::abs(u - a.at(v)) > bound) return false;
    return true;
}

}  // namespace

TEST_CASE("single toppling") {
    const HeightFunction h = HeightFunction::uniform(1.0);
    SandState s = SandState::point_mass(3.0);
    SandState t = topple(s, {0, 0}, h);
    CHECK(t.at({0, 0}) == 1.0);
    for (Vertex v : sphere(1)) CHECK(t.at(v) == 0.5);
    CHECK(t.total() == 3.0);

    // Stable vertices and infinite heights are no-ops.
    SandState u = topple(t, {1, 0}, h);
    CHECK(u.masses() == t.masses());
    HeightFunction blocked;
    blocked.overrides[{0, 0}] = kInfiniteHeight;
    CHECK(topple(s, {0, 0}, blocked).masses() == s.masses());
}

TEST_CASE("mass 3: one toppling reaches the limit") {
    for (Schedule sched : {Schedule::parallel, Schedule::round_robin}) {
        auto r = run(3.0, sched);
        CHECK(r.report.converged);
        CHECK(r.odometer.at({0, 0}) == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(r.odometer.values().size() == 1);
        CHECK(r.final_state.at({0, 0}) == doctest::Approx(1.0));
        for (Vertex v : sphere(1)) CHECK(r.final_state.at(v) == doctest::Approx(0.5));
        CHECK(r.report.cluster == Region({{0, 0}}));
    }
}

TEST_CASE("mass 5: neighbors reach exactly the threshold and never topple") {
    auto r = run(5.0);
    CHECK(r.odometer.at({0, 0}) == 4.0);
    CHECK(r.odometer.values().size() == 1);
    for (Vertex v : sphere(1)) CHECK(r.final_state.at(v) == 1.0);
    CHECK(r.report.cluster == Region({{0, 0}}));
}

TEST_CASE("mass 9 matches the closed-form odometer") {
    auto exact = potential::closed_form_odometer(1);
    for (Schedule sched : {Schedule::parallel, Schedule::round_robin}) {
        auto r = run(9.0, sched);
        for (Vertex v : ball(3)) {
            const double want = to_double(Rational(exact.at(v)));
            CHECK(r.odometer.at(v) == doctest::Approx(want).epsilon(1e-10));
        }
        CHECK(r.report.cluster == ball(1));
        for (Vertex v : Region({{2, 0}, {0, 2}, {-2, 0}, {0, -2}}))
            CHECK(r.final_state.at(v) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(r.final_state.at({1, 1}) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(r.final_state.at({-1, -1}) == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("mass conservation") {
    for (double m : {3.0, 9.0, 100.0, 729.0, 1000.0})
        for (Schedule sched : {Schedule::parallel, Schedule::round_robin}) {
            auto r = run(m, sched);
            CHECK(r.report.converged);
            CHECK(std::abs(r.report.mass_error) <= 1e-12 * m);
        }
}

TEST_CASE("schedules agree (abelian property)") {
    for (double m : {3.0, 9.0, 100.0, 1000.0}) {
        auto a = run(m, Schedule::parallel);
        auto b = run(m, Schedule::round_robin);
        const double tol = 1e-8 * a.odometer.max_value();
        for (const auto& [v, u] : a.odometer.values())
            CHECK(std::abs(u - b.odometer.at(v)) <= tol);
        for (const auto& [v, u] : b.odometer.values())
            CHECK(std::abs(u - a.odometer.at(v)) <= tol);
        CHECK(a.report.cluster == b.report.cluster);
    }
}

TEST_CASE("odometer identity: final = initial + Lap u") {
    for (double m : {9.0, 100.0}) {
        auto r = run(m);
        const double tol = 1e-8 * m;
        // Check on the support and one ring around it.
        std::vector<Vertex> probe;
        for (const auto& [v, u] : r.odometer.values()) {
            probe.push_back(v);
            for (Vertex w : neighbors(v)) probe.push_back(w);
        }
        for (Vertex v : Region(std::move(probe))) {
            const double mu0 = (v == Vertex{0, 0}) ? m : 0.0;
            CHECK(r.final_state.at(v) == doctest::Approx(mu0 + lap(r.odometer, v)).epsilon(tol));
        }
    }
}

TEST_CASE("engine invariants hold for random multi-source states") {
    std::mt19937_64 rng(1729);
    const Region arena = ball(6);
    const HeightFunction h = HeightFunction::uniform(1.0);
    for (int trial = 0; trial < 5; ++trial) {
        SandState mu0;
        for (int i = 0; i < 4; ++i) {
            Vertex v = arena.sorted()[rng() % arena.size()];
            mu0.add(v, 1.0 + static_cast<double>(rng() % 1000) / 100.0);
        }
        auto a = stabilize(mu0, h, StabilizeOptions{Schedule::parallel, 1e-12, 10'000'000});
        auto b = stabilize(mu0, h, StabilizeOptions{Schedule::round_robin, 1e-12, 10'000'000});
        REQUIRE(a.report.converged);
        const double m = mu0.total();
        CHECK(std::abs(a.report.mass_error) <= 1e-12 * m);
        CHECK(sup_difference_below(a.odometer, b.odometer, 1e-8 * a.odometer.max_value()));
        // Final state is stable and satisfies the odometer identity.
        std::vector<Vertex> probe;
        for (const auto& [v, u] : a.odometer.values()) {
            probe.push_back(v);
            for (Vertex w : neighbors(v)) probe.push_back(w);
        }
        for (Vertex v : Region(std::move(probe))) {
            CHECK(a.final_state.at(v) <= 1.0 + 1e-11 * m);
            CHECK(a.final_state.at(v) ==
                  doctest::Approx(mu0.at(v) + lap(a.odometer, v)).epsilon(1e-8 * m));
        }
    }
}

TEST_CASE("cluster stays inside the a-priori bounding ball") {
    for (double m : {3.0, 9.0, 27.0, 100.0}) {
        auto r = run(m);
        for (Vertex v : r.report.cluster) CHECK(radius(v) <= static_cast<std::int64_t>(m));
    }
}

TEST_CASE("runs are deterministic") {
    auto a = run(137.5);
    auto b = run(137.5);
    CHECK(a.odometer.values() == b.odometer.values());
    CHECK(a.final_state.masses() == b.final_state.masses());
    CHECK(a.report.iterations == b.report.iterations);
}

TEST_CASE("sweep cap reports non-convergence") {
    auto r = stabilize(SandState::point_mass(9.0), HeightFunction::uniform(1.0),
                       StabilizeOptions{Schedule::parallel, 1e-12, 1});
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.residual > 0.0);
}

TEST_CASE("odometer grows monotonically with the sweep count") {
    Odometer previous;
    for (std::int64_t sweeps = 1; sweeps <= 6; ++sweeps) {
        auto r = stabilize(SandState::point_mass(27.0), HeightFunction::uniform(1.0),
                           StabilizeOptions{Schedule::round_robin, 1e-12, sweeps});
        for (const auto& [v, u] : previous.values()) CHECK(r.odometer.at(v) >= u);
        previous = std::move(r.odometer);
    }
}

TEST_CASE("masses off the graph are rejected") {
    SandState s;
    CHECK_THROWS_AS(s.add({1, -1}, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(s.add({0, 0}, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(stabilize(SandState::point_mass(1.0), HeightFunction::uniform(1.0),
                              StabilizeOptions{Schedule::parallel, 0.0, 10}),
                    std::invalid_argument);
}

TEST_CASE("infinite height blocks toppling") {
    HeightFunction h;
    h.overrides[{0, 0}] = kInfiniteHeight;
    auto r = stabilize(SandState::point_mass(2.0), h, StabilizeOptions{});
    CHECK(r.report.iterations <= 1);
    CHECK(r.final_state.at({0, 0}) == 2.0);
    CHECK(r.odometer.values().empty());
}

TEST_CASE("three waves grow the ball distribution") {
    for (std::int64_t n : {1, 2, 3, 4}) {
        auto w = run_three_waves(n);
        CHECK(w.converged);
        const auto stats = BallStatsTable::cached(n);
        const auto stats_next = BallStatsTable::cached(n + 1);
        CHECK(w.wave2_mass_added == 1.5 * stats.boundary_size);
        CHECK(w.wave2_mass_added == stats_next.b() - stats.b());
        CHECK(w.wave2_state_dev <= 1e-8);
        CHECK(w.wave3_odometer_dev <= 1e-8);
        CHECK(w.final_distribution_dev <= 1e-8);
    }
}

TEST_CASE("three waves, by hand, at n = 1") {
    auto w = run_three_waves(1);
    CHECK(w.wave2_mass_added == 6.0);
    // After wave 2: 1 at the origin, 2 at each neighbor (wave2_state_dev
    // measures exactly that pattern).
    CHECK(w.wave2_state_dev <= 1e-9);
    CHECK(w.wave1.at({0, 0}) == doctest::Approx(2.0));
    for (Vertex v : sphere(1)) CHECK(w.wave3.at(v) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(w.final_state.at({0, 0}) == doctest::Approx(1.0).epsilon(1e-9));
    for (Vertex v : Region({{2, 0}, {0, 2}, {-2, 0}, {0, -2}}))
        CHECK(w.final_state.at(v) == doctest::Approx(0.5).epsilon(1e-9));
}
