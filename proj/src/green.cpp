#include "gasket/green.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include "gasket/linsolve.hpp"

namespace gasket::green {

using sandpile::HeightFunction;
using sandpile::Odometer;
using sandpile::SandState;

Rational GreenTable::at(Vertex v) const {
    auto it = values.find(v);
    return it == values.end() ? Rational(0) : it->second;
}

GreenTable stopped_green(const Region& a, Vertex source) {
    if (!a.contains(source))
        throw std::invalid_argument("stopped_green: source " + to_string(source) + " not in A");
    DirichletSolver solver(a);
    auto g = solver.solve([&](Vertex v) { return v == source ? Rational(-1) : Rational(0); });

    // The defining property Lap g = -delta_source must hold exactly.
    for (Vertex v : a) {
        Rational sum = 0;
        for (Vertex w : neighbors(v)) {
            auto it = g.find(w);
            if (it != g.end()) sum += it->second;
        }
        const Rational lap = sum / 4 - g.at(v);
        if (lap != (v == source ? Rational(-1) : Rational(0)))
            throw std::logic_error("stopped_green: defining property failed at " + to_string(v));
        if (g.at(v) < 0)
            throw std::logic_error("stopped_green: negative visit count at " + to_string(v));
    }
    return GreenTable{a, source, std::move(g)};
}

Rational HarmonicMeasure::at(Vertex v) const {
    auto it = weights.find(v);
    return it == weights.end() ? Rational(0) : it->second;
}

Rational HarmonicMeasure::total() const {
    Rational t = 0;
    for (const auto& [v, w] : weights) t += w;
    return t;
}

HarmonicMeasure harmonic_measure(const Region& a, Vertex source) {
    const GreenTable g = stopped_green(a, source);
    HarmonicMeasure nu{a, source, {}};
    for (Vertex x : boundaries(a).outer) {
        Rational w = 0;
        for (Vertex y : neighbors(x))
            if (a.contains(y)) w += g.at(y);
        w /= 4;
        if (w != 0) nu.weights.emplace(x, std::move(w));
    }
    if (nu.total() != 1)
        throw std::logic_error("harmonic_measure: exit probabilities sum to " +
                               gasket::to_string(nu.total()));
    return nu;
}

sandpile::StabilizeResult green_via_sandpile(const Region& a, double n, Vertex source,
                                             double epsilon) {
    if (!a.contains(source))
        throw std::invalid_argument("green_via_sandpile: source not in A");
    if (!(n > 0)) throw std::invalid_argument("green_via_sandpile: mass must be positive");
    SandState mu0;
    for (Vertex v : a) mu0.add(v, 1.0);
    mu0.add(source, n);
    sandpile::StabilizeOptions opts;
    opts.schedule = sandpile::Schedule::round_robin;
    opts.epsilon = epsilon;
    return stabilize(mu0, HeightFunction::unit_inside(a), opts);
}

std::unordered_map<Vertex, Rational, VertexHash> gamma(const Region& bounding_set,
                                                       const SandState& mu0,
                                                       const HeightFunction& h) {
    for (const auto& [v, m] : mu0.masses())
        if (m != 0 && !bounding_set.contains(v))
            throw std::invalid_argument("gamma: mass at " + to_string(v) +
                                        " outside the bounding set");
    for (Vertex v : bounding_set)
        if (std::isinf(h.at(v)))
            throw std::invalid_argument("gamma: height is infinite inside the bounding set");

    DirichletSolver solver(bounding_set);
    // Explicit return type: gmpxx expression templates must not escape the
    // lambda body.
    auto rhs = [&](Vertex v) -> Rational {
        return rational_from_double(h.at(v)) - rational_from_double(mu0.at(v));
    };
    auto g = solver.solve(rhs);
    for (Vertex v : bounding_set) {
        Rational sum = 0;
        for (Vertex w : neighbors(v)) {
            auto it = g.find(w);
            if (it != g.end()) sum += it->second;
        }
        if (sum / 4 - g.at(v) != rhs(v))
            throw std::logic_error("gamma: Laplacian identity failed at " + to_string(v));
    }
    return g;
}

std::unordered_map<Vertex, double, VertexHash> least_superharmonic_majorant(
    const std::unordered_map<Vertex, double, VertexHash>& g, const Region& bounding_set,
    double tolerance) {
    auto value_of = [&](const std::unordered_map<Vertex, double, VertexHash>& m, Vertex v) {
        auto it = m.find(v);
        if (it == m.end())
            throw std::invalid_argument("least_superharmonic_majorant: obstacle undefined at " +
                                        to_string(v));
        return it->second;
    };

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (Vertex v : bounding_set) {
        const double x = value_of(g, v);
        lo = first ? x : std::min(lo, x);
        hi = first ? x : std::max(hi, x);
        first = false;
    }
    const double stop = tolerance * std::max(hi - lo, 0.0);

    auto s = g;  // frozen at g outside the set
    // Monotone relaxation from below: s <- max(g, neighborhood average).
    const std::int64_t cap = 100'000'000;
    for (std::int64_t iter = 0; iter < cap; ++iter) {
        double change = 0.0;
        for (Vertex v : bounding_set) {
            double avg = 0.0;
            for (Vertex w : neighbors(v)) avg += 0.25 * value_of(s, w);
            const double nv = std::max(value_of(g, v), avg);
            double& slot = s.at(v);
            change = std::max(change, nv - slot);
            slot = nv;
        }
        if (change <= stop) return s;
    }
    throw std::runtime_error("least_superharmonic_majorant: relaxation did not settle");
}

namespace {

// {z : d(z, support) <= depth} by multi-source BFS; bails out as soon as the
// set exceeds the cap so huge masses fail fast instead of enumerating.
Region within_distance(const Region& support, std::int64_t depth, std::size_t cap) {
    std::unordered_set<Vertex, VertexHash> seen(support.begin(), support.end());
    std::vector<Vertex> frontier(support.begin(), support.end());
    for (std::int64_t d = 0; d < depth && !frontier.empty(); ++d) {
        std::vector<Vertex> next;
        for (Vertex v : frontier)
            for (Vertex w : neighbors(v))
                if (seen.insert(w).second) next.push_back(w);
        if (seen.size() > cap)
            throw std::runtime_error(
                "odometer_via_obstacle: bounding set exceeds the exact-solve cap of " +
                std::to_string(cap) + " vertices; enable tight_radius or use the iterative engine");
        frontier = std::move(next);
    }
    return Region(std::vector<Vertex>(seen.begin(), seen.end()));
}

}  // namespace

Odometer odometer_via_obstacle(const SandState& mu0, const HeightFunction& h,
                               const ObstacleOptions& options) {
    const Region support = mu0.support();
    if (support.empty()) return Odometer{};
    const double total = mu0.total();

    std::int64_t depth;
    if (options.tight_radius) {
        depth = 2 * BallStatsTable::shape_radius(total);
    } else {
        depth = static_cast<std::int64_t>(std::floor(total));
    }
    const Region bounding = within_distance(support, depth, options.dense_cap);

    const auto gamma_table = gamma(bounding, mu0, h);
    std::unordered_map<Vertex, double, VertexHash> obstacle;
    obstacle.reserve(bounding.size() * 3);
    for (Vertex v : bounding) obstacle[v] = -to_double(gamma_table.at(v));
    for (Vertex v : boundaries(bounding).outer) obstacle[v] = 0.0;  // gamma vanishes outside

    const auto majorant = least_superharmonic_majorant(obstacle, bounding,
                                                       options.majorant_tolerance);

    std::unordered_map<Vertex, double, VertexHash> u;
    for (Vertex v : bounding) {
        const double value = to_double(gamma_table.at(v)) + majorant.at(v);
        if (value > 0) u.emplace(v, value);
    }
    return Odometer(std::move(u));
}

}  // namespace gasket::green
