#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "gasket/green.hpp"
#include "gasket/potential.hpp"

using namespace gasket;
using namespace gasket::green;
using sandpile::HeightFunction;
using sandpile::SandState;

namespace {

Region ball_interior(std::int64_t n) {
    const Region b = ball(n);
    return difference(b, boundaries(b).inner);
}

}  // namespace

TEST_CASE("green function on a single vertex") {
    GreenTable g = stopped_green(Region({{0, 0}}), {0, 0});
    CHECK(g.at({0, 0}) == 1);
    CHECK(g.at({1, 0}) == 0);
    CHECK_THROWS_AS(stopped_green(Region({{0, 0}}), {1, 0}), std::invalid_argument);
}

TEST_CASE("green table symmetry under origin-fixing automorphisms") {
    const Region a = ball_interior(2);
    GreenTable g = stopped_green(a, {0, 0});
    for (Vertex v : a) {
        CHECK(g.at(v) == g.at({v.y, v.x}));
        CHECK(g.at(v) == g.at({-v.x, -v.y}));
    }
}

TEST_CASE("green function is symmetric in its two arguments") {
    const Region a = ball_interior(2);
    std::vector<GreenTable> tables;
    for (Vertex s : a) tables.push_back(stopped_green(a, s));
    for (std::size_t i = 0; i < tables.size(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            CHECK(tables[i].at(tables[j].source) == tables[j].at(tables[i].source));
}

TEST_CASE("harmonic measure of a single vertex") {
    HarmonicMeasure nu = harmonic_measure(Region({{0, 0}}), {0, 0});
    CHECK(nu.total() == 1);
    for (Vertex v : sphere(1)) CHECK(nu.at(v) == make_rational(1, 4));
}

TEST_CASE("harmonic measure is uniform on the ball boundary") {
    for (std::int64_t n : {2, 3, 4}) {
        const Region a = ball_interior(n);
        const Region bd = boundaries(ball(n)).inner;
        HarmonicMeasure nu = harmonic_measure(a, {0, 0});
        CHECK(nu.total() == 1);
        CHECK(nu.weights.size() == bd.size());
        const Rational want = make_rational(1, static_cast<long>(bd.size()));
        for (Vertex v : bd) CHECK(nu.at(v) == want);
    }
}

TEST_CASE("harmonic measure sums to one on asymmetric regions") {
    // A lopsided region: a ball around a non-origin vertex.
    const Region a = Region({{0, 0}, {1, 0}, {0, 1}, {1, 1}, {2, 0}});
    HarmonicMeasure nu = harmonic_measure(a, {1, 0});
    CHECK(nu.total() == 1);
    for (const auto& [v, w] : nu.weights) CHECK(w > 0);
}

TEST_CASE("exit measure properties on random connected regions") {
    // Seeded random growth from the origin; exactness of the total and the
    // support being the outer boundary must hold for any finite region.
    std::mt19937_64 rng(4242);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Vertex> grown{{0, 0}};
        while (grown.size() < 12 + 5 * static_cast<std::size_t>(trial)) {
            Vertex v = grown[rng() % grown.size()];
            const auto nb = neighbors(v);
            grown.push_back(nb[rng() % 4]);
        }
        const Region a(std::move(grown));
        HarmonicMeasure nu = harmonic_measure(a, {0, 0});
        CHECK(nu.total() == 1);
        const Region outer = boundaries(a).outer;
        for (const auto& [v, w] : nu.weights) {
            CHECK(outer.contains(v));
            CHECK(w > 0);
        }
    }
}

TEST_CASE("sandpile realization of the green function") {
    auto r = green_via_sandpile(Region({{0, 0}}), 2.0);
    CHECK(r.odometer.at({0, 0}) == doctest::Approx(2.0));
    for (Vertex v : sphere(1)) CHECK(r.final_state.at(v) == doctest::Approx(0.5));

    const Region a = ball_interior(2);
    GreenTable g = stopped_green(a, {0, 0});
    auto s = green_via_sandpile(a, 6.0);
    double gmax = 0.0;
    for (Vertex v : a) gmax = std::max(gmax, 6.0 * to_double(g.at(v)));
    for (Vertex v : a)
        CHECK(std::abs(s.odometer.at(v) - 6.0 * to_double(g.at(v))) <= 1e-8 * gmax);
    // Leaked mass is the rescaled harmonic measure: 6/4 on each corner.
    for (Vertex v : boundaries(ball(2)).inner)
        CHECK(s.final_state.at(v) == doctest::Approx(1.5).epsilon(1e-10));
}

TEST_CASE("gamma vanishes when the initial mass equals the height") {
    const Region b = ball(2);
    SandState mu0;
    for (Vertex v : b) mu0.add(v, 1.0);
    auto g = gamma(b, mu0, HeightFunction::uniform(1.0));
    for (Vertex v : b) CHECK(g.at(v) == 0);
}

TEST_CASE("gamma for a point source") {
    const Region b = ball(1);
    auto g = gamma(b, SandState::point_mass(3.0), HeightFunction::uniform(1.0));
    // Lap gamma(o) = h - mu0 = 1 - 3 at the origin, exactly.
    Rational lap_origin = 0;
    for (Vertex w : neighbors({0, 0})) lap_origin += g.at(w);
    lap_origin = lap_origin / 4 - g.at({0, 0});
    CHECK(lap_origin == Rational(-2));
    CHECK(g.at({1, 0}) == g.at({0, 1}));
    CHECK(g.at({1, 0}) == g.at({-1, 0}));
    CHECK(g.at({1, 0}) == g.at({0, -1}));

    SandState off_support = SandState::point_mass(1.0, {2, 0});
    CHECK_THROWS_AS(gamma(b, off_support, HeightFunction::uniform(1.0)),
                    std::invalid_argument);
    HeightFunction infinite;
    infinite.default_value = sandpile::kInfiniteHeight;
    CHECK_THROWS_AS(gamma(b, SandState::point_mass(1.0), infinite), std::invalid_argument);
}

TEST_CASE("majorant of a superharmonic obstacle is the obstacle") {
    const Region b = ball(2);
    std::unordered_map<Vertex, double, VertexHash> g;
    for (Vertex v : b) g[v] = 5.0;
    for (Vertex v : boundaries(b).outer) g[v] = 5.0;
    auto s = least_superharmonic_majorant(g, b);
    for (Vertex v : b) CHECK(s.at(v) == 5.0);
}

TEST_CASE("obstacle route reproduces the base case") {
    auto u = odometer_via_obstacle(SandState::point_mass(3.0), HeightFunction::uniform(1.0));
    CHECK(u.at({0, 0}) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(u.support_above(1e-8) == Region({{0, 0}}));
}

TEST_CASE("obstacle route matches the closed form for mass 9") {
    auto u = odometer_via_obstacle(SandState::point_mass(9.0), HeightFunction::uniform(1.0));
    auto exact = potential::closed_form_odometer(1);
    for (Vertex v : ball(2)) {
        const double want = to_double(Rational(exact.at(v)));
        CHECK(std::abs(u.at(v) - want) <= 1e-6 * 10.0);
    }
    CHECK(u.support_above(1e-6) == ball(1));
}

TEST_CASE("obstacle route cluster for mass 15") {
    auto u = odometer_via_obstacle(SandState::point_mass(15.0), HeightFunction::uniform(1.0));
    CHECK(u.support_above(1e-6) == ball(2));
}

TEST_CASE("tight bounding radius gives the same odometer") {
    ObstacleOptions tight;
    tight.tight_radius = true;
    auto a = odometer_via_obstacle(SandState::point_mass(9.0), HeightFunction::uniform(1.0));
    auto b = odometer_via_obstacle(SandState::point_mass(9.0), HeightFunction::uniform(1.0), tight);
    for (Vertex v : ball(2)) CHECK(a.at(v) == doctest::Approx(b.at(v)).epsilon(1e-9));
}

TEST_CASE("oversized bounding sets are refused") {
    ObstacleOptions small_cap;
    small_cap.dense_cap = 10;
    CHECK_THROWS_AS(
        odometer_via_obstacle(SandState::point_mass(50.0), HeightFunction::uniform(1.0), small_cap),
        std::runtime_error);
}
