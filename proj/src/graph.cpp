#include "gasket/graph.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <stdexcept>

namespace gasket {

namespace {

// Smallest k with value <= 2^k.
int level_of(std::int64_t value) {
    int k = 0;
    while ((std::int64_t{1} << k) < value) ++k;
    return k;
}

// Membership in the positive branch, both coordinates nonnegative.
bool contains_pos(std::int64_t x, std::int64_t y) {
    if (x + y <= 1) return true;  // (0,0), (1,0), (0,1)
    int k = level_of(x + y);
    while (k > 0) {
        const std::int64_t h = std::int64_t{1} << (k - 1);
        if (x >= h)
            x -= h;
        else if (y >= h)
            y -= h;
        --k;
    }
    return x + y <= 1;
}

}  // namespace

bool contains(Vertex v) {
    if (v.x >= 0 && v.y >= 0) return contains_pos(v.x, v.y);
    if (v.x <= 0 && v.y <= 0) return contains_pos(-v.x, -v.y);
    return false;
}

bool unit_cell_exists(std::int64_t ax, std::int64_t ay) {
    return cell_exists(ax, ay, 0);
}

bool cell_exists(std::int64_t ax, std::int64_t ay, int size_exp) {
    if (ax < 0 || ay < 0) return false;
    const std::int64_t side = std::int64_t{1} << size_exp;
    int k = level_of(ax + ay + side);
    while (k > size_exp) {
        const std::int64_t h = std::int64_t{1} << (k - 1);
        if (ax >= h)
            ax -= h;
        else if (ay >= h)
            ay -= h;
        else if (ax + ay + side > h)
            return false;  // the cell straddles a junction: it is a hole
        --k;
    }
    return ax == 0 && ay == 0;
}

std::array<Vertex, 4> neighbors(Vertex v) {
    if (!contains(v)) throw std::invalid_argument("neighbors: " + to_string(v) + " not in SG");

    std::array<Vertex, 4> out;
    int n = 0;
    // Every vertex lies in exactly two unit cells; each cell contributes its
    // other two vertices. The origin has one cell per branch.
    auto scan_branch = [&](std::int64_t x, std::int64_t y, std::int64_t s) {
        if (unit_cell_exists(x, y)) {
            out[n++] = {s * (x + 1), s * y};
            out[n++] = {s * x, s * (y + 1)};
        }
        if (unit_cell_exists(x - 1, y)) {
            out[n++] = {s * (x - 1), s * y};
            out[n++] = {s * (x - 1), s * (y + 1)};
        }
        if (unit_cell_exists(x, y - 1)) {
            out[n++] = {s * x, s * (y - 1)};
            out[n++] = {s * (x + 1), s * (y - 1)};
        }
    };
    if (v.x == 0 && v.y == 0) {
        scan_branch(0, 0, +1);
        scan_branch(0, 0, -1);
    } else if (v.x >= 0 && v.y >= 0) {
        scan_branch(v.x, v.y, +1);
    } else {
        scan_branch(-v.x, -v.y, -1);
    }
    if (n != 4) throw std::logic_error("neighbors: degree " + std::to_string(n) + " at " + to_string(v));
    std::sort(out.begin(), out.end());
    return out;
}

bool adjacent(Vertex u, Vertex v) {
    if (!contains(u) || !contains(v)) return false;
    const auto nb = neighbors(u);
    return std::find(nb.begin(), nb.end(), v) != nb.end();
}

Region::Region(std::vector<Vertex> members) : sorted_(std::move(members)) {
    std::sort(sorted_.begin(), sorted_.end());
    sorted_.erase(std::unique(sorted_.begin(), sorted_.end()), sorted_.end());
    set_.reserve(sorted_.size() * 2);
    set_.insert(sorted_.begin(), sorted_.end());
}

namespace {

// BFS enumeration of the metric ball; the metric is |x|+|y| so the frontier
// can be pruned by coordinate sum alone.
std::vector<Vertex> enumerate_ball(std::int64_t n) {
    std::vector<Vertex> out;
    std::unordered_set<Vertex, VertexHash> seen;
    std::vector<Vertex> frontier{Vertex{0, 0}};
    seen.insert({0, 0});
    while (!frontier.empty()) {
        std::vector<Vertex> next;
        for (Vertex v : frontier) {
            out.push_back(v);
            for (Vertex w : neighbors(v)) {
                if (radius(w) <= n && seen.insert(w).second) next.push_back(w);
            }
        }
        frontier = std::move(next);
    }
    return out;
}

}  // namespace

Region ball(std::int64_t n) {
    if (n < 0) throw std::invalid_argument("ball: negative radius");
    return Region(enumerate_ball(n));
}

Region sphere(std::int64_t n) {
    std::vector<Vertex> shell;
    for (Vertex v : enumerate_ball(n))
        if (radius(v) == n) shell.push_back(v);
    return Region(std::move(shell));
}

Region inner_sphere(std::int64_t n) {
    std::vector<Vertex> shell;
    for (Vertex v : enumerate_ball(n)) {
        if (radius(v) != n) continue;
        bool all_inside = true;
        for (Vertex w : neighbors(v))
            if (radius(w) > n) all_inside = false;
        if (all_inside) shell.push_back(v);
    }
    return Region(std::move(shell));
}

Boundaries boundaries(const Region& a) {
    std::vector<Vertex> inner;
    std::vector<Vertex> outer;
    for (Vertex v : a) {
        for (Vertex w : neighbors(v)) {
            if (!a.contains(w)) {
                inner.push_back(v);
                outer.push_back(w);
            }
        }
    }
    return {Region(std::move(inner)), Region(std::move(outer))};
}

Region difference(const Region& a, const Region& b) {
    std::vector<Vertex> keep;
    for (Vertex v : a)
        if (!b.contains(v)) keep.push_back(v);
    return Region(std::move(keep));
}

BallStats ball_stats(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("ball_stats: requires n >= 1");
    return BallStatsTable::cached(n);
}

BallStatsTable::BallStatsTable(std::int64_t n_max) : n_max_(n_max) {
    if (n_max < 1) throw std::invalid_argument("BallStatsTable: requires n_max >= 1");
    std::vector<std::int64_t> shell(n_max + 2, 0);
    std::vector<std::int64_t> bnd(n_max + 1, 0);
    for (Vertex v : enumerate_ball(n_max)) {
        const std::int64_t d = radius(v);
        ++shell[d];
        std::int64_t dmax = 0;
        for (Vertex w : neighbors(v)) dmax = std::max(dmax, radius(w));
        // v is a boundary vertex of B_d exactly when some neighbor leaves B_d;
        // neighbor distances differ from d by at most 1.
        if (d >= 1 && dmax == d + 1) ++bnd[d];
    }
    stats_.resize(n_max + 1);
    std::int64_t cumulative = 0;
    for (std::int64_t n = 0; n <= n_max; ++n) {
        cumulative += shell[n];
        if (n == 0) continue;
        stats_[n].n = n;
        stats_[n].size = cumulative;
        stats_[n].boundary_size = bnd[n];
        stats_[n].b2 = 2 * cumulative - bnd[n];
    }
}

const BallStats& BallStatsTable::at(std::int64_t n) const {
    if (n < 1 || n > n_max_) throw std::out_of_range("BallStatsTable::at");
    return stats_[n];
}

namespace {
std::mutex g_stats_mutex;
std::unique_ptr<BallStatsTable> g_stats_table;

const BallStatsTable& grown_table(std::int64_t need) {
    if (!g_stats_table || g_stats_table->max_radius() < need) {
        std::int64_t cap = g_stats_table ? g_stats_table->max_radius() : 16;
        while (cap < need) cap *= 2;
        g_stats_table = std::make_unique<BallStatsTable>(cap);
    }
    return *g_stats_table;
}
}  // namespace

BallStats BallStatsTable::cached(std::int64_t n) {
    std::lock_guard<std::mutex> lock(g_stats_mutex);
    return grown_table(n).at(n);
}

std::int64_t BallStatsTable::shape_radius(double mass) {
    std::lock_guard<std::mutex> lock(g_stats_mutex);
    // b_n is strictly increasing, so scan for the first radius exceeding mass.
    std::int64_t n = 1;
    while (true) {
        const auto& table = grown_table(n + 1);
        while (n + 1 <= table.max_radius()) {
            if (table.at(n + 1).b() > mass) return n;
            ++n;
        }
    }
}

ProperTriangle::ProperTriangle(Vertex a, int k, int br) : anchor(a), size_exp(k), branch(br) {
    if (k < 0 || (br != +1 && br != -1))
        throw std::invalid_argument("ProperTriangle: bad size or branch");
    const std::int64_t ax = br * a.x;
    const std::int64_t ay = br * a.y;
    if (!cell_exists(ax, ay, k))
        throw std::invalid_argument("ProperTriangle: no size-2^" + std::to_string(k) +
                                    " cell anchored at " + to_string(a));
}

std::array<Vertex, 3> ProperTriangle::corners() const {
    const std::int64_t s = branch * (std::int64_t{1} << size_exp);
    return {anchor, anchor + Vertex{s, 0}, anchor + Vertex{0, s}};
}

std::array<Vertex, 3> ProperTriangle::midpoints() const {
    const auto c = corners();
    auto mid = [](Vertex u, Vertex v) { return Vertex{(u.x + v.x) / 2, (u.y + v.y) / 2}; };
    return {mid(c[1], c[2]), mid(c[0], c[2]), mid(c[0], c[1])};
}

Subdivision subdivide(const ProperTriangle& t) {
    if (t.size_exp == 0) throw std::invalid_argument("subdivide: atomic triangle");
    const auto m = t.midpoints();
    const int k = t.size_exp - 1;
    return Subdivision{
        {ProperTriangle(t.anchor, k, t.branch),  // corners {a, C, B}
         ProperTriangle(m[2], k, t.branch),      // corners {C, b, A}
         ProperTriangle(m[1], k, t.branch)},     // corners {B, A, c}
        m};
}

namespace {
void collect_triangle(const ProperTriangle& t, std::vector<Vertex>& out) {
    const auto c = t.corners();
    out.insert(out.end(), c.begin(), c.end());
    if (t.size_exp == 0) return;
    for (const auto& child : subdivide(t).children) collect_triangle(child, out);
}
}  // namespace

Region ProperTriangle::vertex_set() const {
    std::vector<Vertex> vs;
    collect_triangle(*this, vs);
    return Region(std::move(vs));
}

ProperBall::ProperBall(Vertex c, int k) : center(c), size_exp(k) {
    if (k < 0) throw std::invalid_argument("ProperBall: negative size");
    const std::int64_t r = std::int64_t{1} << k;
    // BFS out to graph distance 2^k from the center.
    std::unordered_set<Vertex, VertexHash> seen{c};
    std::vector<Vertex> frontier{c};
    std::vector<Vertex> members{c};
    std::vector<Vertex> last_shell;
    for (std::int64_t d = 1; d <= r; ++d) {
        std::vector<Vertex> next;
        for (Vertex v : frontier)
            for (Vertex w : neighbors(v))
                if (seen.insert(w).second) next.push_back(w);
        members.insert(members.end(), next.begin(), next.end());
        if (d == r) last_shell = next;
        frontier = std::move(next);
    }
    vertices_ = Region(std::move(members));
    std::vector<Vertex> extremal;
    for (Vertex v : Region(std::move(last_shell)))
        for (Vertex w : neighbors(v))
            if (!vertices_.contains(w)) {
                extremal.push_back(v);
                break;
            }
    if (extremal.size() != 4 ||
        static_cast<std::int64_t>(vertices_.size()) != BallStatsTable::cached(r).size)
        throw std::invalid_argument("ProperBall: ball around " + to_string(c) +
                                    " is not a proper ball of size 2^" + std::to_string(k));
    std::sort(extremal.begin(), extremal.end());
    std::copy(extremal.begin(), extremal.end(), extremal_.begin());
}

Vertex psi_k(int k, Vertex v) {
    const std::int64_t side = std::int64_t{1} << k;
    if (v.x < 0 || v.y < 0 || v.x + v.y > side)
        throw std::invalid_argument("psi_k: " + to_string(v) + " outside V_" + std::to_string(k));
    return {v.y, side - v.x - v.y};
}

std::pair<double, double> embed(Vertex v) {
    return {static_cast<double>(v.x) + static_cast<double>(v.y) / 2.0,
            std::sqrt(3.0) / 2.0 * static_cast<double>(std::llabs(v.y))};
}

}  // namespace gasket
