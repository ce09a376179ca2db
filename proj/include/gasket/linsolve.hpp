// Exact dense linear algebra over the rationals, sized for the Dirichlet
// systems this project solves (a few hundred unknowns). The LU factorization
// is kept so one region can serve many right-hand sides.
#pragma once

#include <cstddef>
#include <functional>
#include <unordered_map>
#include <vector>

#include "gasket/exact.hpp"
#include "gasket/graph.hpp"

namespace gasket {

class RationalLU {
  public:
    // Factors PA = LU in place; throws std::domain_error on a singular matrix.
    explicit RationalLU(std::vector<std::vector<Rational>> a);

    std::size_t dimension() const { return lu_.size(); }
    std::vector<Rational> solve(const std::vector<Rational>& rhs) const;

  private:
    std::vector<std::vector<Rational>> lu_;
    std::vector<std::size_t> perm_;
};

// Dirichlet problems for the discrete Laplacian: find f with
//   Lap f(v) = rhs(v)   for v in the interior set,
//   f(w)     = data(w)  for w outside it.
// Interior vertices are ordered by (distance to origin, x, y), which keeps
// the elimination close to banded.
class DirichletSolver {
  public:
    // Refuses systems beyond the cap: these solves are oracles, so nothing
    // silently degrades to floating point.
    static constexpr std::size_t kDefaultDenseCap = 2000;

    explicit DirichletSolver(const Region& interior, std::size_t cap = kDefaultDenseCap);

    const Region& interior() const { return interior_; }

    // Values on the interior; boundary data defaults to zero off the set.
    std::unordered_map<Vertex, Rational, VertexHash> solve(
        const std::function<Rational(Vertex)>& rhs,
        const std::function<Rational(Vertex)>& boundary_data) const;

    std::unordered_map<Vertex, Rational, VertexHash> solve(
        const std::function<Rational(Vertex)>& rhs) const;

  private:
    Region interior_;
    std::vector<Vertex> order_;
    std::unordered_map<Vertex, std::size_t, VertexHash> index_;
    RationalLU lu_;

    static RationalLU assemble(const Region& interior, const std::vector<Vertex>& order,
                               const std::unordered_map<Vertex, std::size_t, VertexHash>& index);
};

}  // namespace gasket
