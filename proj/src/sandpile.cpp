#include "gasket/sandpile.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace gasket::sandpile {

namespace {

[[maybe_unused]] int engine_threads() {
    static const int cached = [] {
        int n = 1;
#ifdef _OPENMP
        n = omp_get_max_threads();
#endif
        if (const char* env = std::getenv("GASKET_SANDPILE_THREADS")) {
            const int cap = std::atoi(env);
            if (cap >= 1) n = std::min(n, cap);
        }
        return n;
    }();
    return cached;
}

double kahan_sum(const std::vector<double>& values) {
    double sum = 0.0, carry = 0.0;
    for (double v : values) {
        double y = v - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

SandState SandState::point_mass(double mass, Vertex v) {
    SandState s;
    s.add(v, mass);
    return s;
}

SandState SandState::from_masses(std::unordered_map<Vertex, double, VertexHash> masses) {
    SandState s;
    s.masses_ = std::move(masses);
    std::vector<double> vals;
    vals.reserve(s.masses_.size());
    for (const auto& [v, m] : s.masses_) {
        if (m < 0) throw std::invalid_argument("SandState: negative mass at " + to_string(v));
        vals.push_back(m);
    }
    s.total_ = kahan_sum(vals);
    return s;
}

void SandState::add(Vertex v, double mass) {
    if (mass < 0) throw std::invalid_argument("SandState::add: negative mass");
    if (!contains(v)) throw std::invalid_argument("SandState::add: " + to_string(v) + " not in SG");
    masses_[v] += mass;
    total_ += mass;
}

double SandState::at(Vertex v) const {
    auto it = masses_.find(v);
    return it == masses_.end() ? 0.0 : it->second;
}

Region SandState::support() const {
    std::vector<Vertex> sup;
    for (const auto& [v, m] : masses_)
        if (m > 0) sup.push_back(v);
    return Region(std::move(sup));
}

HeightFunction HeightFunction::unit_inside(const Region& a) {
    HeightFunction h;
    h.default_value = kInfiniteHeight;
    h.overrides.reserve(a.size() * 2);
    for (Vertex v : a) h.overrides.emplace(v, 1.0);
    return h;
}

Odometer::Odometer(std::unordered_map<Vertex, double, VertexHash> values)
    : values_(std::move(values)) {}

double Odometer::at(Vertex v) const {
    auto it = values_.find(v);
    return it == values_.end() ? 0.0 : it->second;
}

double Odometer::max_value() const {
    double m = 0.0;
    for (const auto& [v, u] : values_) m = std::max(m, u);
    return m;
}

Region Odometer::support_above(double threshold) const {
    std::vector<Vertex> sup;
    for (const auto& [v, u] : values_)
        if (u > threshold) sup.push_back(v);
    return Region(std::move(sup));
}

SandState topple(const SandState& state, Vertex v, const HeightFunction& h) {
    if (!contains(v)) throw std::invalid_argument("topple: " + to_string(v) + " not in SG");
    const double hv = h.at(v);
    const double excess = state.at(v) - hv;
    if (!(excess > 0)) return state;  // also covers infinite height
    auto masses = state.masses();
    masses[v] = hv;
    for (Vertex w : neighbors(v)) masses[w] += excess / 4.0;
    return SandState::from_masses(std::move(masses));
}

namespace {

// Flat vertex arena for the sweep loops. Vertices enter when they first
// receive mass; neighbor links are wired once, in sorted-neighbor slot
// order, so floating-point accumulation order is fixed regardless of
// schedule or thread count.
class Arena {
  public:
    explicit Arena(const HeightFunction& h) : hf_(h) {}

    std::int32_t add(Vertex v) {
        auto it = index_.find(v);
        if (it != index_.end()) return it->second;
        const std::int32_t i = static_cast<std::int32_t>(verts_.size());
        index_.emplace(v, i);
        verts_.push_back(v);
        mass_.push_back(0.0);
        odom_.push_back(0.0);
        height_.push_back(hf_.at(v));
        nbr_.insert(nbr_.end(), {-1, -1, -1, -1});
        const auto nbs = neighbors(v);
        for (int j = 0; j < 4; ++j) {
            auto jt = index_.find(nbs[j]);
            if (jt == index_.end()) continue;
            const std::int32_t u = jt->second;
            nbr_[4 * i + j] = u;
            const auto back = neighbors(nbs[j]);
            for (int l = 0; l < 4; ++l)
                if (back[l] == v) nbr_[4 * u + l] = i;
        }
        order_dirty_ = true;
        quiet_sweeps_ = 0;
        return i;
    }

    void set_mass(std::int32_t i, double m) { mass_[i] = m; }
    std::size_t size() const { return verts_.size(); }

    double measure_residual() const {
        double r = 0.0;
        for (std::size_t i = 0; i < mass_.size(); ++i) {
            const double e = mass_[i] - height_[i];
            if (e > r) r = e;
        }
        return r;
    }

    // In-place sweep over the support in sorted vertex order. Returns the
    // largest excess seen; vertices discovered mid-sweep topple next time.
    double round_robin_sweep() {
        prepare_order();
        const std::size_t n0 = order_.size();
        double maxe = 0.0;
        for (std::size_t t = 0; t < n0; ++t) {
            const std::int32_t i = order_[t];
            const double e = mass_[i] - height_[i];
            if (e > 0) {
                if (e > maxe) maxe = e;
                odom_[i] += e;
                mass_[i] = height_[i];
                if ((nbr_[4 * i] | nbr_[4 * i + 1] | nbr_[4 * i + 2] | nbr_[4 * i + 3]) < 0)
                    ensure_neighbors(i);
                const double q = 0.25 * e;
                mass_[nbr_[4 * i]] += q;
                mass_[nbr_[4 * i + 1]] += q;
                mass_[nbr_[4 * i + 2]] += q;
                mass_[nbr_[4 * i + 3]] += q;
            }
        }
        return maxe;
    }

    // Two-buffer sweep: every vertex unstable in the snapshot topples at
    // once; neighbor contributions are gathered in sorted-neighbor order.
    double parallel_sweep() {
        // Receivers must exist before the gather.
        const std::size_t n0 = size();
        for (std::size_t i = 0; i < n0; ++i)
            if (mass_[i] > height_[i] &&
                (nbr_[4 * i] | nbr_[4 * i + 1] | nbr_[4 * i + 2] | nbr_[4 * i + 3]) < 0)
                ensure_neighbors(static_cast<std::int32_t>(i));
        const std::size_t n = size();
        excess_.assign(n, 0.0);
        next_.resize(n);
        double maxe = 0.0;
        const std::int64_t count = static_cast<std::int64_t>(n);
        // The gather form never writes across vertices, so the worker count
        // cannot change the result.
#ifdef _OPENMP
#pragma omp parallel for reduction(max : maxe) num_threads(engine_threads()) \
    if (count > 16384 && engine_threads() > 1)
#endif
        for (std::int64_t i = 0; i < count; ++i) {
            const double e = mass_[i] - height_[i];
            if (e > 0) {
                excess_[i] = e;
                odom_[i] += e;
                if (e > maxe) maxe = e;
            }
        }
#ifdef _OPENMP
#pragma omp parallel for num_threads(engine_threads()) \
    if (count > 16384 && engine_threads() > 1)
#endif
        for (std::int64_t i = 0; i < count; ++i) {
            double acc = mass_[i] - excess_[i];
            for (int j = 0; j < 4; ++j) {
                const std::int32_t k = nbr_[4 * i + j];
                if (k >= 0) acc += 0.25 * excess_[k];
            }
            next_[i] = acc;
        }
        mass_.swap(next_);
        return maxe;
    }

    double sweep(Schedule schedule) {
        return schedule == Schedule::round_robin ? round_robin_sweep() : parallel_sweep();
    }

    SandState final_state() const {
        std::unordered_map<Vertex, double, VertexHash> m;
        m.reserve(size() * 2);
        for (std::size_t i = 0; i < size(); ++i)
            if (mass_[i] != 0.0) m.emplace(verts_[i], mass_[i]);
        return SandState::from_masses(std::move(m));
    }

    Odometer odometer() const {
        std::unordered_map<Vertex, double, VertexHash> u;
        u.reserve(size() * 2);
        for (std::size_t i = 0; i < size(); ++i)
            if (odom_[i] > 0.0) u.emplace(verts_[i], odom_[i]);
        return Odometer(std::move(u));
    }

    Region cluster(double threshold) const {
        std::vector<Vertex> c;
        for (std::size_t i = 0; i < size(); ++i)
            if (odom_[i] > threshold) c.push_back(verts_[i]);
        return Region(std::move(c));
    }

    double total_mass() const { return kahan_sum(mass_); }

  private:
    void ensure_neighbors(std::int32_t i) {
        const auto nbs = neighbors(verts_[i]);
        for (int j = 0; j < 4; ++j)
            if (nbr_[4 * i + j] < 0) add(nbs[j]);
    }

    void prepare_order() {
        if (order_dirty_) {
            order_.resize(verts_.size());
            std::iota(order_.begin(), order_.end(), 0);
            std::sort(order_.begin(), order_.end(),
                      [&](std::int32_t a, std::int32_t b) { return verts_[a] < verts_[b]; });
            order_dirty_ = false;
            quiet_sweeps_ = 0;
            compacted_ = false;
        } else if (!compacted_ && ++quiet_sweeps_ >= 256) {
            // Growth has stopped: lay the arrays out in sweep order once so
            // the long convergence tail runs on sequential memory.
            renumber();
            compacted_ = true;
        }
    }

    void renumber() {
        const std::size_t n = verts_.size();
        std::vector<std::int32_t> inv(n);
        for (std::size_t t = 0; t < n; ++t) inv[order_[t]] = static_cast<std::int32_t>(t);
        auto permute = [&](auto& vec) {
            auto copy = vec;
            for (std::size_t t = 0; t < n; ++t) copy[t] = vec[order_[t]];
            vec.swap(copy);
        };
        permute(verts_);
        permute(mass_);
        permute(odom_);
        permute(height_);
        std::vector<std::int32_t> nbr2(4 * n);
        for (std::size_t t = 0; t < n; ++t)
            for (int j = 0; j < 4; ++j) {
                const std::int32_t k = nbr_[4 * static_cast<std::size_t>(order_[t]) + j];
                nbr2[4 * t + j] = k < 0 ? -1 : inv[k];
            }
        nbr_.swap(nbr2);
        for (std::size_t t = 0; t < n; ++t) index_[verts_[t]] = static_cast<std::int32_t>(t);
        std::iota(order_.begin(), order_.end(), 0);
    }

    const HeightFunction& hf_;
    std::unordered_map<Vertex, std::int32_t, VertexHash> index_;
    std::vector<Vertex> verts_;
    std::vector<double> mass_, odom_, height_;
    std::vector<std::int32_t> nbr_;
    std::vector<std::int32_t> order_;
    std::vector<double> excess_, next_;
    bool order_dirty_ = true;
    bool compacted_ = false;
    std::int64_t quiet_sweeps_ = 0;
};

}  // namespace

StabilizeResult stabilize(const SandState& initial, const HeightFunction& h,
                          const StabilizeOptions& options) {
    if (options.epsilon <= 0) throw std::invalid_argument("stabilize: epsilon must be positive");
    if (!(h.default_value > 0))
        throw std::invalid_argument("stabilize: height default must be positive");
    for (const auto& [v, hv] : h.overrides)
        if (hv < 0) throw std::invalid_argument("stabilize: negative height at " + to_string(v));
    Arena arena(h);
    std::vector<std::pair<Vertex, double>> entries(initial.masses().begin(),
                                                   initial.masses().end());
    std::sort(entries.begin(), entries.end());
    for (const auto& [v, m] : entries) {
        if (!contains(v)) throw std::invalid_argument("stabilize: " + to_string(v) + " not in SG");
        arena.set_mass(arena.add(v), m);
    }

    const double total = initial.total();
    const double threshold = options.epsilon * total;

    StabilizeReport report;
    bool done = false;
    while (!done && report.iterations < options.max_sweeps) {
        const double maxe = arena.sweep(options.schedule);
        ++report.iterations;
        if (maxe <= 0.5 * threshold) {
            report.residual = arena.measure_residual();
            if (report.residual <= threshold) done = true;
        }
    }
    if (!done) {
        report.converged = false;
        report.residual = arena.measure_residual();
    }
    report.total_mass = arena.total_mass();
    report.mass_error = report.total_mass - total;
    report.cluster = arena.cluster(threshold);

    return StabilizeResult{arena.final_state(), arena.odometer(), std::move(report)};
}

ThreeWaveResult run_three_waves(std::int64_t n, double epsilon) {
    if (n < 1) throw std::invalid_argument("run_three_waves: requires n >= 1");
    const BallStats stats = BallStatsTable::cached(n);
    const BallStats stats_next = BallStatsTable::cached(n + 1);
    const Region bn = ball(n);
    const Region bd = boundaries(bn).inner;
    const Region interior = difference(bn, bd);

    StabilizeOptions opts;
    opts.schedule = Schedule::round_robin;
    opts.epsilon = epsilon;

    ThreeWaveResult out;
    out.wave2_mass_added = 1.5 * static_cast<double>(stats.boundary_size);

    auto w1 = stabilize(SandState::point_mass(stats.b()), HeightFunction::uniform(1.0), opts);
    out.wave1 = std::move(w1.odometer);

    SandState mu2 = std::move(w1.final_state);
    mu2.add({0, 0}, out.wave2_mass_added);
    auto w2 = stabilize(mu2, HeightFunction::unit_inside(interior), opts);
    out.wave2 = std::move(w2.odometer);
    for (Vertex v : bn) {
        const double want = bd.contains(v) ? 2.0 : 1.0;
        out.wave2_state_dev = std::max(out.wave2_state_dev, std::abs(w2.final_state.at(v) - want));
    }
    for (const auto& [v, m] : w2.final_state.masses())
        if (!bn.contains(v)) out.wave2_state_dev = std::max(out.wave2_state_dev, m);

    auto w3 = stabilize(w2.final_state, HeightFunction::uniform(1.0), opts);
    out.wave3 = std::move(w3.odometer);
    for (Vertex v : bn)
        out.wave3_odometer_dev = std::max(out.wave3_odometer_dev, std::abs(out.wave3.at(v) - 2.0));
    for (const auto& [v, u] : out.wave3.values())
        if (!bn.contains(v)) out.wave3_odometer_dev = std::max(out.wave3_odometer_dev, u);

    out.final_state = std::move(w3.final_state);
    const Region bnext = ball(n + 1);
    const Region bd_next = boundaries(bnext).inner;
    for (Vertex v : bnext) {
        const double want = bd_next.contains(v) ? 0.5 : 1.0;
        out.final_distribution_dev =
            std::max(out.final_distribution_dev, std::abs(out.final_state.at(v) - want));
    }
    for (const auto& [v, m] : out.final_state.masses())
        if (!bnext.contains(v)) out.final_distribution_dev = std::max(out.final_distribution_dev, m);
    out.converged = w1.report.converged && w2.report.converged && w3.report.converged;

    // Wave-2 bookkeeping: the mass sent in the last two waves is exactly the
    // increment of the ball mass, 2*(3/2)|dB_n| = b2_{n+1} - b2_n.
    if (3 * stats.boundary_size != stats_next.b2 - stats.b2)
        throw std::logic_error("run_three_waves: counting identity violated at n=" +
                               std::to_string(n));
    return out;
}

}  // namespace gasket::sandpile
