#include "gasket/linsolve.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gasket {

RationalLU::RationalLU(std::vector<std::vector<Rational>> a) : lu_(std::move(a)) {
    const std::size_t n = lu_.size();
    for (const auto& row : lu_)
        if (row.size() != n) throw std::invalid_argument("RationalLU: matrix not square");
    perm_.resize(n);
    std::iota(perm_.begin(), perm_.end(), std::size_t{0});

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && lu_[pivot][col] == 0) ++pivot;
        if (pivot == n) throw std::domain_error("RationalLU: singular matrix");
        if (pivot != col) {
            std::swap(lu_[pivot], lu_[col]);
            std::swap(perm_[pivot], perm_[col]);
        }
        const Rational& d = lu_[col][col];
        for (std::size_t row = col + 1; row < n; ++row) {
            if (lu_[row][col] == 0) continue;
            Rational factor = lu_[row][col] / d;
            lu_[row][col] = factor;  // store the multiplier in L
            for (std::size_t j = col + 1; j < n; ++j) {
                if (lu_[col][j] != 0) lu_[row][j] -= factor * lu_[col][j];
            }
        }
    }
}

std::vector<Rational> RationalLU::solve(const std::vector<Rational>& rhs) const {
    const std::size_t n = lu_.size();
    if (rhs.size() != n) throw std::invalid_argument("RationalLU::solve: size mismatch");
    std::vector<Rational> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[perm_[i]];
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (lu_[i][j] != 0) x[i] -= lu_[i][j] * x[j];
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j)
            if (lu_[i][j] != 0) x[i] -= lu_[i][j] * x[j];
        x[i] /= lu_[i][i];
    }
    return x;
}

namespace {

std::vector<Vertex> distance_order(const Region& interior) {
    std::vector<Vertex> order = interior.sorted();
    std::stable_sort(order.begin(), order.end(), [](Vertex a, Vertex b) {
        if (radius(a) != radius(b)) return radius(a) < radius(b);
        return a < b;
    });
    return order;
}

std::unordered_map<Vertex, std::size_t, VertexHash> build_index(const std::vector<Vertex>& order) {
    std::unordered_map<Vertex, std::size_t, VertexHash> index;
    index.reserve(order.size() * 2);
    for (std::size_t i = 0; i < order.size(); ++i) index[order[i]] = i;
    return index;
}

}  // namespace

namespace {
const Region& check_cap(const Region& interior, std::size_t cap) {
    if (interior.size() > cap)
        throw std::runtime_error("DirichletSolver: " + std::to_string(interior.size()) +
                                 " unknowns exceed the exact-solve cap of " + std::to_string(cap) +
                                 "; use the iterative engine");
    return interior;
}
}  // namespace

DirichletSolver::DirichletSolver(const Region& interior, std::size_t cap)
    : interior_(check_cap(interior, cap)),
      order_(distance_order(interior_)),
      index_(build_index(order_)),
      lu_(assemble(interior_, order_, index_)) {}

RationalLU DirichletSolver::assemble(
    const Region& interior, const std::vector<Vertex>& order,
    const std::unordered_map<Vertex, std::size_t, VertexHash>& index) {
    const std::size_t n = order.size();
    std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n, Rational(0)));
    for (std::size_t i = 0; i < n; ++i) {
        a[i][i] = 4;
        for (Vertex w : neighbors(order[i])) {
            if (!interior.contains(w)) continue;
            a[i][index.at(w)] -= 1;
        }
    }
    return RationalLU(std::move(a));
}

std::unordered_map<Vertex, Rational, VertexHash> DirichletSolver::solve(
    const std::function<Rational(Vertex)>& rhs,
    const std::function<Rational(Vertex)>& boundary_data) const {
    const std::size_t n = order_.size();
    // Row for v: 4 f(v) - sum_{w ~ v, w interior} f(w)
    //          = -4 rhs(v) + sum_{w ~ v, w exterior} data(w).
    std::vector<Rational> b(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational acc = -4 * rhs(order_[i]);
        for (Vertex w : neighbors(order_[i]))
            if (!interior_.contains(w)) acc += boundary_data(w);
        b[i] = std::move(acc);
    }
    const std::vector<Rational> x = lu_.solve(b);
    std::unordered_map<Vertex, Rational, VertexHash> out;
    out.reserve(n * 2);
    for (std::size_t i = 0; i < n; ++i) out.emplace(order_[i], x[i]);
    return out;
}

std::unordered_map<Vertex, Rational, VertexHash> DirichletSolver::solve(
    const std::function<Rational(Vertex)>& rhs) const {
    return solve(rhs, [](Vertex) { return Rational(0); });
}

}  // namespace gasket
