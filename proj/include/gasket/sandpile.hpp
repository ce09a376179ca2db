// Divisible sandpile dynamics on the gasket graph.
//
// A sand distribution assigns nonnegative mass to finitely many vertices.
// Toppling a vertex moves the excess above its height threshold in equal
// quarters to its four neighbors; the odometer accumulates everything a
// vertex ever emits. Stabilization sweeps the support until every vertex is
// within epsilon*M of its threshold. Two sweep schedules are provided: a
// two-buffer parallel sweep (all currently unstable vertices topple against
// a snapshot) and an in-place round-robin sweep in sorted vertex order. The
// limit they approach is schedule-independent; agreement of the two is part
// of the verification suite.
#pragma once

#include <cstdint>
#include <limits>
#include <unordered_map>

#include "gasket/graph.hpp"
#include "gasket/vertex.hpp"

namespace gasket::sandpile {

constexpr double kInfiniteHeight = std::numeric_limits<double>::infinity();

class SandState {
  public:
    SandState() = default;

    static SandState point_mass(double mass, Vertex v = {0, 0});
    static SandState from_masses(std::unordered_map<Vertex, double, VertexHash> masses);

    // Adds mass at v (negative amounts are rejected at construction sites).
    void add(Vertex v, double mass);
    double at(Vertex v) const;
    double total() const { return total_; }

    const std::unordered_map<Vertex, double, VertexHash>& masses() const { return masses_; }
    Region support() const;

  private:
    std::unordered_map<Vertex, double, VertexHash> masses_;
    double total_ = 0.0;
};

// Height threshold: a default value plus finitely many overrides; either may
// be +infinity (an infinite-height vertex never topples).
struct HeightFunction {
    double default_value = 1.0;
    std::unordered_map<Vertex, double, VertexHash> overrides;

    double at(Vertex v) const {
        auto it = overrides.find(v);
        return it == overrides.end() ? default_value : it->second;
    }

    static HeightFunction uniform(double value = 1.0) { return {value, {}}; }

    // 1 on A, infinite outside: mass entering the complement is absorbed.
    static HeightFunction unit_inside(const Region& a);
};

class Odometer {
  public:
    Odometer() = default;
    explicit Odometer(std::unordered_map<Vertex, double, VertexHash> values);

    double at(Vertex v) const;
    double max_value() const;
    Region support_above(double threshold) const;  // {u > threshold}
    const std::unordered_map<Vertex, double, VertexHash>& values() const { return values_; }

  private:
    std::unordered_map<Vertex, double, VertexHash> values_;
};

enum class Schedule { parallel, round_robin };

struct StabilizeOptions {
    Schedule schedule = Schedule::parallel;
    double epsilon = 1e-12;            // stop when max excess <= epsilon * M
    std::int64_t max_sweeps = 10'000'000;
};

struct StabilizeReport {
    std::int64_t iterations = 0;  // full sweeps
    double residual = 0.0;        // max excess at termination
    bool converged = true;
    double total_mass = 0.0;      // sum of final masses (compensated)
    double mass_error = 0.0;      // total_mass - M
    Region cluster;               // {u > epsilon * M}
};

struct StabilizeResult {
    SandState final_state;
    Odometer odometer;
    StabilizeReport report;
};

// One application of the toppling operator at v.
SandState topple(const SandState& state, Vertex v, const HeightFunction& h);

StabilizeResult stabilize(const SandState& initial, const HeightFunction& h,
                          const StabilizeOptions& options = {});

inline StabilizeResult stabilize(const SandState& initial, const HeightFunction& h,
                                 Schedule schedule, double epsilon) {
    return stabilize(initial, h, StabilizeOptions{schedule, epsilon, 10'000'000});
}

// The three toppling waves that grow the ball distribution from radius n to
// n+1: wave 1 stabilizes b_n at the origin, wave 2 drains the extra
// (3/2)|dB_n| through the filled interior (height infinite elsewhere),
// wave 3 relaxes the result with the usual unit height. The deviations
// record how far the observed states are from the predicted ones.
struct ThreeWaveResult {
    Odometer wave1, wave2, wave3;
    SandState final_state;
    double wave2_mass_added = 0.0;       // (3/2)|dB_n|
    double wave2_state_dev = 0.0;        // vs 1 on the interior, 2 on dB_n, 0 outside
    double wave3_odometer_dev = 0.0;     // vs 2 on B_n, 0 outside
    double final_distribution_dev = 0.0; // vs the radius n+1 ball distribution
    bool converged = true;
};

ThreeWaveResult run_three_waves(std::int64_t n, double epsilon = 1e-12);

}  // namespace gasket::sandpile
