#include "gasket/potential.hpp"

#include <mutex>
#include <stdexcept>
#include <vector>

namespace gasket::potential {

std::array<Rational, 3> midpoint_rule(const std::array<Rational, 3>& corner_values, int k,
                                      const BigInt& m) {
    if (k < 1) throw std::invalid_argument("midpoint_rule: requires k >= 1");
    const Rational shift = Rational(2 * pow_int(5, k - 1) * m);
    const Rational& ha = corner_values[0];
    const Rational& hb = corner_values[1];
    const Rational& hc = corner_values[2];
    return {(ha + 2 * hb + 2 * hc) / 5 - shift,
            (2 * ha + hb + 2 * hc) / 5 - shift,
            (2 * ha + 2 * hb + hc) / 5 - shift};
}

Rational center_rule(const std::array<Rational, 4>& extremal_values, int k, const BigInt& m) {
    if (k < 1) throw std::invalid_argument("center_rule: requires k >= 1");
    Rational sum = 0;
    for (const Rational& v : extremal_values) sum += v;
    return sum / 4 - Rational(pow_int(5, k - 1) * m);
}

const BigInt& PotentialTable::at(Vertex v) const {
    auto it = values.find(v);
    if (it == values.end())
        throw std::out_of_range("PotentialTable::at: " + to_string(v) + " outside domain");
    return it->second;
}

namespace {

BigInt integral(const Rational& r) {
    if (r.get_den() != 1)
        throw std::logic_error("constant-Laplacian recursion produced the non-integer " +
                               gasket::to_string(r));
    return r.get_num();
}

void store(PotentialTable& table, Vertex v, const BigInt& value) {
    auto [it, inserted] = table.values.emplace(v, value);
    if (!inserted && it->second != value)
        throw std::logic_error("conflicting values at shared corner " + to_string(v));
}

// Fill the triangle anchored at `a` (positive branch) given its corner
// values; recursion bottoms out at size 2, whose corners plus midpoints are
// all six of its vertices.
void fill_triangle(PotentialTable& table, Vertex a, int k, const std::array<Rational, 3>& cv) {
    const std::int64_t side = std::int64_t{1} << k;
    store(table, a, integral(cv[0]));
    store(table, a + Vertex{side, 0}, integral(cv[1]));
    store(table, a + Vertex{0, side}, integral(cv[2]));
    if (k == 0) return;

    const auto mv = midpoint_rule(cv, k, 1);
    const std::int64_t h = side / 2;
    const Vertex ma = a + Vertex{h, h};
    const Vertex mb = a + Vertex{0, h};
    const Vertex mc = a + Vertex{h, 0};
    if (k == 1) {
        store(table, ma, integral(mv[0]));
        store(table, mb, integral(mv[1]));
        store(table, mc, integral(mv[2]));
        return;
    }
    fill_triangle(table, a, k - 1, {cv[0], mv[2], mv[1]});
    fill_triangle(table, mc, k - 1, {mv[2], cv[1], mv[0]});
    fill_triangle(table, mb, k - 1, {mv[1], mv[0], cv[2]});
}

std::array<Rational, 3> top_corners(int k) {
    return {Rational(0), Rational(0), Rational(2 * pow_int(5, k))};
}

}  // namespace

PotentialTable build_u_tilde(int k) {
    if (k < 0) throw std::invalid_argument("build_u_tilde: negative level");
    PotentialTable table;
    table.laplacian_target = 1;
    fill_triangle(table, {0, 0}, k, top_corners(k));
    std::vector<Vertex> domain;
    domain.reserve(table.values.size());
    for (const auto& [v, value] : table.values) domain.push_back(v);
    table.domain = Region(std::move(domain));
    return table;
}

BigInt u_tilde_at(Vertex v) {
    if (v.x < 0 || v.y < 0 || !contains(v))
        throw std::invalid_argument("u_tilde_at: " + to_string(v) + " not in the positive branch");
    int k = 0;
    while ((std::int64_t{1} << k) < v.x + v.y) ++k;

    Vertex a{0, 0};
    std::array<Rational, 3> cv = top_corners(k);
    while (true) {
        const std::int64_t side = std::int64_t{1} << k;
        if (v == a) return integral(cv[0]);
        if (v == a + Vertex{side, 0}) return integral(cv[1]);
        if (v == a + Vertex{0, side}) return integral(cv[2]);

        const auto mv = midpoint_rule(cv, k, 1);
        const std::int64_t h = side / 2;
        const std::int64_t rx = v.x - a.x;
        const std::int64_t ry = v.y - a.y;
        if (rx >= h) {
            a = a + Vertex{h, 0};
            cv = {mv[2], cv[1], mv[0]};
        } else if (ry >= h) {
            a = a + Vertex{0, h};
            cv = {mv[1], mv[0], cv[2]};
        } else {
            cv = {cv[0], mv[2], mv[1]};
        }
        --k;
    }
}

namespace {
std::mutex g_ell_mutex;
std::unordered_map<Vertex, BigInt, VertexHash> g_ell_cache;
}  // namespace

BigInt ell(Vertex v) {
    if (!contains(v)) throw std::invalid_argument("ell: " + to_string(v) + " not in SG");
    const Vertex folded{std::llabs(v.x), std::llabs(v.y)};
    std::lock_guard<std::mutex> lock(g_ell_mutex);
    auto it = g_ell_cache.find(folded);
    if (it != g_ell_cache.end()) return it->second;
    BigInt value = u_tilde_at(folded);
    g_ell_cache.emplace(folded, value);
    return value;
}

BigInt ExactOdometer::at(Vertex v) const {
    auto it = values.find(v);
    return it == values.end() ? BigInt(0) : it->second;
}

Region ExactOdometer::support() const {
    std::vector<Vertex> sup;
    for (const auto& [v, value] : values)
        if (value > 0) sup.push_back(v);
    return Region(std::move(sup));
}

ExactOdometer closed_form_odometer(int k) {
    if (k < 0) throw std::invalid_argument("closed_form_odometer: negative level");
    ExactOdometer odo;
    odo.k = k;
    const PotentialTable table = build_u_tilde(k);
    for (Vertex v : ball(std::int64_t{1} << k))
        odo.values.emplace(v, table.at(psi_k(k, {std::llabs(v.x), std::llabs(v.y)})));
    return odo;
}

}  // namespace gasket::potential
