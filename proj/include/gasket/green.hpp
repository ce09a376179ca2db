// Stopped Green functions, harmonic measures, and the obstacle-problem route
// to the sandpile odometer.
//
// All random-walk quantities are computed by exact rational linear algebra;
// the walk itself is never simulated. The obstacle route recovers the
// odometer as (gamma + s) on a bounding set, where gamma solves
// Lap gamma = h - mu0 there and s is the least superharmonic majorant of
// -gamma, obtained by monotone relaxation.
#pragma once

#include <unordered_map>

#include "gasket/exact.hpp"
#include "gasket/graph.hpp"
#include "gasket/sandpile.hpp"

namespace gasket::green {

// Expected visit counts of the simple random walk started at `source`
// before it first leaves A.
struct GreenTable {
    Region region;
    Vertex source;
    std::unordered_map<Vertex, Rational, VertexHash> values;

    Rational at(Vertex v) const;  // zero outside A
};

GreenTable stopped_green(const Region& a, Vertex source);

// Exit distribution of the walk from A; supported on the outer boundary,
// sums to exactly 1.
struct HarmonicMeasure {
    Region region;
    Vertex source;
    std::unordered_map<Vertex, Rational, VertexHash> weights;

    Rational at(Vertex v) const;
    Rational total() const;
};

HarmonicMeasure harmonic_measure(const Region& a, Vertex source);

// Sandpile realization of n * g_A(o, .): stabilize 1_A + n*delta_source with
// height 1 on A and infinity outside. The returned odometer should match the
// Green table and the leaked mass should match n * harmonic measure.
sandpile::StabilizeResult green_via_sandpile(const Region& a, double n, Vertex source = {0, 0},
                                             double epsilon = 1e-12);

// Exact solution of Lap gamma = h - mu0 on the bounding set (zero outside).
// Requires supp(mu0) inside the set and h finite on it.
std::unordered_map<Vertex, Rational, VertexHash> gamma(const Region& bounding_set,
                                                       const sandpile::SandState& mu0,
                                                       const sandpile::HeightFunction& h);

// Monotone relaxation for the least superharmonic majorant of g on the set,
// with values frozen to g outside; starts at g and iterates
// s <- max(g, neighborhood average) until the sup-change drops below
// tolerance (relative to the spread of g).
std::unordered_map<Vertex, double, VertexHash> least_superharmonic_majorant(
    const std::unordered_map<Vertex, double, VertexHash>& g, const Region& bounding_set,
    double tolerance = 1e-12);

struct ObstacleOptions {
    double majorant_tolerance = 1e-12;
    std::size_t dense_cap = 2000;  // refuse larger exact solves
    bool tight_radius = false;     // bound by 2x the shape radius instead of the
                                   // total mass
};

// Odometer via the obstacle problem: bounding set of radius M (total mass)
// around the support, exact gamma, relaxed majorant, then (gamma + s)
// clipped at zero.
sandpile::Odometer odometer_via_obstacle(const sandpile::SandState& mu0,
                                         const sandpile::HeightFunction& h,
                                         const ObstacleOptions& options = {});

}  // namespace gasket::green
