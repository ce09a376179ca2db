// Theorem-by-theorem checkers with independent oracles. Each check runs the
// relevant machinery, measures the worst deviation, and reports it whether or
// not the check passed. Exact-arithmetic comparisons are flagged as such.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gasket/exact.hpp"
#include "gasket/graph.hpp"
#include "gasket/sandpile.hpp"

namespace gasket::verify {

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst_error = 0.0;
    bool exact = false;  // comparison performed in exact arithmetic
    std::string details;
};

// Shape theorem for one mass: the cluster of m*delta_o is squeezed between
// B_{n-1} and B_n, n = max{k : b_k <= m}.
CheckResult check_shape_theorem(double mass, double epsilon = 1e-12);

// Shape theorem over a deterministic log-uniform sample of masses plus the
// exact ball masses b_n for n <= dyadic_up_to.
CheckResult check_shape_sweep(int sample_count, double min_mass, double max_mass,
                              std::int64_t dyadic_up_to, std::uint64_t seed = 20240915);

// Ball distribution: mass b_n stabilizes to 1 inside, 1/2 on the boundary,
// 0 outside, with cluster exactly B_{n-1}.
CheckResult check_ball_distribution(std::int64_t n, double tolerance = 1e-8);

// Counting identity |B_n| + |dB_n| = |B_{n+1}| - |dB_{n+1}|/2 for n <= n_max
// (exact integers), plus the boundary doubling at even n and the dyadic ball
// masses b_{2^k} = 3^{k+1}.
CheckResult check_second_wave_identity(std::int64_t n_max);

// Parallel and round-robin schedules agree pointwise.
CheckResult check_abelian(double mass, double tolerance = 1e-8);

// Exact odometer for initial mass b_n: Dirichlet re-solve of the known final
// distribution on B_{n-1} with zero boundary data.
std::unordered_map<Vertex, Rational, VertexHash> exact_odometer_ball(std::int64_t n);

// Closed-form odometer for mass 3^{k+1}: iterative engine within tolerance,
// exact Dirichlet re-solve in exact agreement.
CheckResult check_closed_form_odometer(int k, double tolerance = 1e-6);

// Generalized 1/5-2/5 rules against interior Dirichlet solves with
// randomized rational corner data, exact equality.
CheckResult check_appendix_rule(int k, int configurations = 50, std::uint64_t seed = 20240915);

// Corner values, evenness, positivity, divisibility of u~.
CheckResult check_u_tilde_properties(int k_max, int full_table_k_max = 8);

// Harmonic measure uniformity on the ball boundary plus the Green defining
// property, exact rationals.
CheckResult check_harmonic_uniformity(std::int64_t n);

// Iterative, obstacle-problem, and (for masses 3^{k+1}) closed-form
// odometers agree in sup norm.
CheckResult check_cross_route(double mass, double tolerance = 1e-6);

// Three-wave decomposition postconditions at radius n.
CheckResult check_three_waves(std::int64_t n, double tolerance = 1e-8);

// Conservation across every stabilization the verifier has run so far.
CheckResult conservation_summary(double tolerance = 1e-12);
void reset_conservation_ledger();

// Stabilize and record the run in the conservation ledger.
sandpile::StabilizeResult tracked_stabilize(const sandpile::SandState& initial,
                                            const sandpile::HeightFunction& h,
                                            const sandpile::StabilizeOptions& options);

std::string report_json(const std::vector<CheckResult>& results);

// Named sub-suites at the pinned acceptance parameters.
std::vector<CheckResult> suite_shape();        // 200 sampled masses + b_n, n <= 40
std::vector<CheckResult> suite_ball();         // radii 1..32
std::vector<CheckResult> suite_closed_form();  // k = 1..4
std::vector<CheckResult> suite_u_tilde();      // values to k=12, tables to k=8
std::vector<CheckResult> suite_appendix();     // k = 1..4, 50 configurations
std::vector<CheckResult> suite_counting();     // identity to n=1000, dyadic to k=10
std::vector<CheckResult> suite_green();        // n in {2, 3, 4, 8, 16}
std::vector<CheckResult> suite_abelian();      // masses {3, 9, 100, 1000}
std::vector<CheckResult> suite_cross();        // masses {3, 9, 27}
std::vector<CheckResult> suite_waves();        // radii 1..4

}  // namespace gasket::verify
