#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gasket/io.hpp"
#include "gasket/svg.hpp"

using namespace gasket;
using namespace gasket::io;

TEST_CASE("value map json round-trips and is sorted") {
    sandpile::SandState s;
    s.add({2, 0}, 0.5);
    s.add({0, 0}, 1.0);
    s.add({-1, 0}, 0.125);
    const std::string json = sand_state_json(s);
    CHECK(json.find("[-1, 0, 0.125]") != std::string::npos);
    CHECK(json.find("[-1, 0") < json.find("[0, 0"));
    CHECK(json.find("[0, 0") < json.find("[2, 0"));

    auto parsed = read_value_map(json);
    REQUIRE(parsed.entries.size() == 3);
    CHECK(parsed.total == s.total());
    CHECK(parsed.entries[0].first == Vertex{-1, 0});
    CHECK(parsed.entries[0].second == 0.125);
}

TEST_CASE("17 significant digits survive the round trip") {
    sandpile::SandState s;
    s.add({0, 0}, 1.0 / 3.0);
    auto parsed = read_value_map(sand_state_json(s));
    CHECK(parsed.entries[0].second == 1.0 / 3.0);
}

TEST_CASE("writers are byte-deterministic") {
    sandpile::SandState s;
    s.add({0, 0}, 9.0);
    s.add({1, 0}, 0.1);
    CHECK(sand_state_json(s) == sand_state_json(s));
    CHECK(value_map_csv(s.masses()) == value_map_csv(s.masses()));
}

TEST_CASE("malformed input reports a parse error") {
    CHECK_THROWS_WITH_AS(read_value_map("{oops"), doctest::Contains("parse error"),
                         std::runtime_error);
    CHECK_THROWS_AS(read_value_map("{\"masses\": [[1, 2]]}"), std::runtime_error);
    CHECK_THROWS_AS(read_value_map("{\"wrong\": []}"), std::runtime_error);
}

TEST_CASE("ball table csv rows") {
    const std::string csv = ball_table_csv(3);
    CHECK(csv == "n,ball_size,boundary_size,b_n\n1,5,4,3.0\n2,11,4,9.0\n3,19,8,15.0\n");
}

TEST_CASE("rational string form") {
    CHECK(to_string(make_rational(3, 6)) == "1/2");
    CHECK(to_string(make_rational(-10, 4)) == "-5/2");
    CHECK(to_string(Rational(5)) == "5");
    CHECK_THROWS_AS(make_rational(1, 0), std::invalid_argument);
}

TEST_CASE("potential table json") {
    auto t = potential::build_u_tilde(1);
    const std::string json = potential_table_json(t, 1);
    CHECK(json.find("\"k\": 1") != std::string::npos);
    CHECK(json.find("[0, 2, \"10\"]") != std::string::npos);
    // Lexicographic vertex order.
    CHECK(json.find("[0, 0,") < json.find("[1, 0,"));
}

TEST_CASE("svg output") {
    ValueMap vm;
    vm.entries = {{{0, 0}, 1.0}, {{1, 0}, 0.5}, {{0, 1}, 0.5}};
    vm.total = 2.0;
    const std::string svg = render_svg(vm, 40.0);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("<circle") != std::string::npos);
    CHECK(svg.find("<line") != std::string::npos);   // (0,0)-(1,0) edge
    CHECK(svg.find("url(#ramp)") != std::string::npos);
    CHECK(render_svg(vm, 40.0) == svg);

    // Empty support still renders a legend-only document.
    const std::string empty = render_svg(ValueMap{}, 40.0);
    CHECK(empty.find("<svg") != std::string::npos);
    CHECK(empty.find("<circle") == std::string::npos);
    CHECK(empty.find("url(#ramp)") != std::string::npos);
}

TEST_CASE("embedding position lands in the svg") {
    // Vertex (0, 2) embeds at (1, sqrt(3)); with the origin also present the
    // x pixel of its circle is margin + 1*scale.
    ValueMap vm;
    vm.entries = {{{0, 0}, 0.0}, {{0, 2}, 1.0}};
    const std::string svg = render_svg(vm, 40.0);
    CHECK(svg.find("cx=\"88.000\"") != std::string::npos);  // margin 48 + 40
}
