// Combinatorial model of the doubly-infinite Sierpinski gasket graph.
//
// Membership and adjacency are decided by recursive descent through the
// dyadic construction triangles, so no part of the (infinite) graph is ever
// stored. Finite regions, metric balls and their boundaries, dyadic proper
// triangles/balls, the corner rotation psi_k, and the planar drawing
// embedding live here as well.
#pragma once

#include <array>
#include <cstdint>
#include <unordered_set>
#include <utility>
#include <vector>

#include "gasket/vertex.hpp"

namespace gasket {

// True iff v is a vertex of the gasket graph. Mixed-sign coordinates are
// rejected (the two branches meet only at the origin).
bool contains(Vertex v);

// The four neighbors of v, sorted by (x, y). Throws std::invalid_argument
// if v is not in the graph.
std::array<Vertex, 4> neighbors(Vertex v);

// True iff the unit construction cell {a, a+(1,0), a+(0,1)} (positive
// branch, coordinates of a given nonnegative) is a cell of the gasket.
bool unit_cell_exists(std::int64_t ax, std::int64_t ay);

// Same for the size-2^k cell {a, a+(2^k,0), a+(0,2^k)} in the positive branch.
bool cell_exists(std::int64_t ax, std::int64_t ay, int size_exp);

bool adjacent(Vertex u, Vertex v);

// A finite vertex set with O(1) membership and deterministic (sorted)
// iteration order.
class Region {
  public:
    Region() = default;
    explicit Region(std::vector<Vertex> members);

    bool contains(Vertex v) const { return set_.count(v) != 0; }
    std::size_t size() const { return sorted_.size(); }
    bool empty() const { return sorted_.empty(); }

    // Sorted by (x, y).
    const std::vector<Vertex>& sorted() const { return sorted_; }
    auto begin() const { return sorted_.begin(); }
    auto end() const { return sorted_.end(); }

    friend bool operator==(const Region& a, const Region& b) { return a.sorted_ == b.sorted_; }

  private:
    std::vector<Vertex> sorted_;
    std::unordered_set<Vertex, VertexHash> set_;
};

// Metric ball B_n = {v : |x|+|y| <= n}, sphere S_n (equality), and the part
// of the sphere with no neighbor outside the ball.
Region ball(std::int64_t n);
Region sphere(std::int64_t n);
Region inner_sphere(std::int64_t n);

// Inner boundary (members with a neighbor outside A) and outer boundary
// (non-members with a neighbor inside A).
struct Boundaries {
    Region inner;
    Region outer;
};
Boundaries boundaries(const Region& a);

// Members of a that are not in b.
Region difference(const Region& a, const Region& b);

// |B_n|, |dB_n| and b_n = |B_n| - |dB_n|/2, the latter stored doubled so
// nothing is rounded.
struct BallStats {
    std::int64_t n = 0;
    std::int64_t size = 0;
    std::int64_t boundary_size = 0;
    std::int64_t b2 = 0;  // 2*b_n = 2*size - boundary_size

    double b() const { return static_cast<double>(b2) / 2.0; }
};

BallStats ball_stats(std::int64_t n);

// Ball statistics for every radius 1..n_max from a single enumeration.
class BallStatsTable {
  public:
    explicit BallStatsTable(std::int64_t n_max);

    std::int64_t max_radius() const { return n_max_; }
    const BallStats& at(std::int64_t n) const;

    // max{k >= 1 : b_k <= mass}; grows the table on demand.
    static std::int64_t shape_radius(double mass);

    // Shared table, grown on demand (completed entries are immutable).
    static BallStats cached(std::int64_t n);

  private:
    std::int64_t n_max_;
    std::vector<BallStats> stats_;  // index 1..n_max
};

// Proper triangle of size 2^k: corners {a, a+s*(2^k,0), a+s*(0,2^k)} with
// s = +1 on the positive branch and -1 on the negative one. The induced
// subgraph is a scaled copy of the one-sided gasket iteration and attaches
// to the rest of the graph only at its three corners.
struct ProperTriangle {
    Vertex anchor;
    int size_exp = 0;
    int branch = +1;  // +1 or -1

    ProperTriangle(Vertex a, int k, int br);

    std::array<Vertex, 3> corners() const;   // {a, b, c}
    std::array<Vertex, 3> midpoints() const; // {A, B, C}, X opposite corner x

    // All vertices of the triangle.
    Region vertex_set() const;
};

struct Subdivision {
    std::array<ProperTriangle, 3> children;  // corner sets {a,C,B}, {C,b,A}, {B,A,c}
    std::array<Vertex, 3> midpoints;         // {A, B, C}
};

// Split a proper triangle into its three half-size children. Throws on
// size_exp == 0 ("atomic triangle").
Subdivision subdivide(const ProperTriangle& t);

// Proper ball of size 2^k around a center: the metric ball of radius 2^k
// whose induced subgraph is a copy of B_{2^k}; it touches the rest of the
// graph only at its four extremal points.
struct ProperBall {
    Vertex center;
    int size_exp = 0;

    ProperBall(Vertex c, int k);

    const Region& vertex_set() const { return vertices_; }
    const std::array<Vertex, 4>& extremal_points() const { return extremal_; }

  private:
    Region vertices_;
    std::array<Vertex, 4> extremal_;
};

// Corner rotation of the level-k triangle: (x,y) -> (y, 2^k - x - y).
// Bijective on {x,y >= 0, x+y <= 2^k}; cycles the three corners.
Vertex psi_k(int k, Vertex v);

// Drawing embedding (x + y/2, sqrt(3)/2 * |y|); the negative branch is
// reflected upward.
std::pair<double, double> embed(Vertex v);

}  // namespace gasket
