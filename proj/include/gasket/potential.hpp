// Exact construction of functions with constant Laplacian on the gasket.
//
// The central object is the integer-valued function u~ on the positive
// branch: zero on the row y = 0, equal to 2 on the row y = 1, and with
// discrete Laplacian 1 at every vertex with y >= 1. Its values on the
// level-k triangle are produced top-down from the corner values
// (0, 0, 2*5^k) by the generalized 1/5-2/5 midpoint rule; every division by
// 5 in that recursion is exact. Reflecting u~ through the origin yields a
// function ell with Laplacian 1 on the whole graph, and composing u~ with
// the corner rotation gives the closed-form sandpile odometer for the
// dyadic masses 3^{k+1}.
#pragma once

#include <array>
#include <unordered_map>

#include "gasket/exact.hpp"
#include "gasket/graph.hpp"
#include "gasket/vertex.hpp"

namespace gasket::potential {

// Midpoint values of a function with constant Laplacian m on a proper
// triangle of size 2^k, from its corner values. Entry i of the result is the
// midpoint opposite corner i.
std::array<Rational, 3> midpoint_rule(const std::array<Rational, 3>& corner_values, int k,
                                      const BigInt& m);

// Center value of a function with constant Laplacian m on a proper ball of
// size 2^{k-1}, from its four extremal values.
Rational center_rule(const std::array<Rational, 4>& extremal_values, int k, const BigInt& m);

// Exact integer table of a constant-Laplacian function on a finite domain.
struct PotentialTable {
    Region domain;
    std::unordered_map<Vertex, BigInt, VertexHash> values;
    BigInt laplacian_target = 1;

    const BigInt& at(Vertex v) const;
    bool has(Vertex v) const { return values.count(v) != 0; }
};

// u~ on the level-k triangle (corner values 0, 0, 2*5^k; Laplacian 1).
PotentialTable build_u_tilde(int k);

// Point evaluation of u~ at a positive-branch vertex, by descending the
// triangle hierarchy; O(log radius) exact-integer work per call.
BigInt u_tilde_at(Vertex v);

// ell(x, y) = u~(|x|, |y|): Laplacian 1 on the whole graph. Values are
// memoized across calls.
BigInt ell(Vertex v);

// Closed-form odometer for initial mass 3^{k+1} at the origin:
// (u~ o psi_k)(|x|, |y|) on B_{2^k}, zero outside.
struct ExactOdometer {
    int k = 0;
    std::unordered_map<Vertex, BigInt, VertexHash> values;  // on B_{2^k}

    BigInt at(Vertex v) const;
    Region support() const;  // {u > 0}
};

ExactOdometer closed_form_odometer(int k);

}  // namespace gasket::potential
