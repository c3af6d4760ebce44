#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dpp/configuration.hpp"
#include "dpp/defaults.hpp"
#include "dpp/discretize.hpp"
#include "dpp/errors.hpp"
#include "dpp/estimate.hpp"
#include "dpp/kernel.hpp"
#include "dpp/logderiv.hpp"
#include "dpp/parallel.hpp"
#include "dpp/rng.hpp"
#include "dpp/sampler.hpp"

namespace dpp {

// Raised when particles get closer than the collision floor and local step
// halving cannot separate them.
struct CollisionError : NumericalError {
    using NumericalError::NumericalError;
};

enum class DriftMode {
    ClosedFormHermite,   // -confinement * x_i + sum_j 1/(x_i - x_j)
    EstimatedLogDeriv,   // half the extrapolated log-derivative, one particle at a time
};

inline std::string drift_mode_name(DriftMode m) {
    return m == DriftMode::ClosedFormHermite ? "closed_form_hermite" : "estimated_logderiv";
}

inline DriftMode parse_drift_mode(const std::string& s) {
    if (s == "closed" || s == "closed_form_hermite") return DriftMode::ClosedFormHermite;
    if (s == "estimated" || s == "estimated_logderiv") return DriftMode::EstimatedLogDeriv;
    throw PreconditionError("unknown drift mode '" + s + "'");
}

struct DiffusionConfig {
    double dt = 1e-3;
    double t_final = 1.0;
    DriftMode mode = DriftMode::ClosedFormHermite;
    std::optional<RegularizationSchedule> schedule;  // needed in estimated mode
    double collision_floor = defaults::collision_floor;
    double confinement = 1.0;   // scales the restoring term; 1 matches the kernel
    bool zero_noise = false;    // deterministic flow, for fixed-point checks
    int max_halvings = 10;

    void validate() const {
        if (!(dt > 0.0)) throw PreconditionError("DiffusionConfig: need dt > 0");
        if (!(t_final >= 0.0)) throw PreconditionError("DiffusionConfig: need t_final >= 0");
        if (!(collision_floor > 0.0))
            throw PreconditionError("DiffusionConfig: need collision_floor > 0");
        if (collision_floor * collision_floor > dt)
            throw PreconditionError(
                "DiffusionConfig: collision_floor^2 must not exceed dt");
        const double steps = t_final / dt;
        if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps))
            throw PreconditionError("DiffusionConfig: t_final must be a multiple of dt");
        if (mode == DriftMode::EstimatedLogDeriv && !schedule)
            throw PreconditionError("DiffusionConfig: estimated drift needs a schedule");
    }

    std::int64_t n_steps() const { return std::llround(t_final / dt); }
};

// Ordered particle positions at a point in time.
struct DiffusionState {
    std::vector<double> xs;  // strictly increasing
    double time = 0.0;
};

inline double min_gap(const std::vector<double>& xs) {
    double g = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) g = std::min(g, xs[i + 1] - xs[i]);
    return g;
}

// Euler-Maruyama integrator for the interacting diffusion driven by half the
// log-derivative of the reduced measure. In closed form the drift for the
// finite Hermite family is used directly; in estimated mode the drift on
// particle i is half the extrapolated log-derivative at x_i against the
// remaining particles. Steps whose proposal violates the collision floor are
// rejected and retried as two half steps, recursively up to max_halvings.
class Diffusion {
  public:
    Diffusion(KernelModel kernel, DiffusionConfig cfg)
        : kernel_(std::move(kernel)), cfg_(std::move(cfg)) {
        cfg_.validate();
    }

    const DiffusionConfig& config() const { return cfg_; }

    double drift_at(const std::vector<double>& xs, std::size_t i) const {
        if (cfg_.mode == DriftMode::ClosedFormHermite) {
            double s = -cfg_.confinement * xs[i];
            for (std::size_t j = 0; j < xs.size(); ++j)
                if (j != i) s += 1.0 / (xs[i] - xs[j]);
            return s;
        }
        std::vector<double> others;
        others.reserve(xs.size() - 1);
        for (std::size_t j = 0; j < xs.size(); ++j)
            if (j != i) others.push_back(xs[j]);
        const Configuration rest = Configuration::from_points(others);
        const LogDerivative ld(kernel_, xs[i], *cfg_.schedule);
        return 0.5 * ld.evaluate(rest).extrapolated;
    }

    std::vector<double> drift(const std::vector<double>& xs) const {
        if (min_gap(xs) < cfg_.collision_floor)
            throw CollisionError("drift evaluated below the collision floor");
        std::vector<double> d(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i) d[i] = drift_at(xs, i);
        return d;
    }

    DiffusionState step(const DiffusionState& s, Rng& rng) const {
        DiffusionState out;
        out.xs = substep(s.xs, cfg_.dt, rng, 0);
        out.time = s.time + cfg_.dt;
        return out;
    }

    DiffusionState run(DiffusionState s, Rng& rng,
                       const std::function<void(const DiffusionState&)>& observer = {}) const {
        if (observer) observer(s);
        const std::int64_t steps = cfg_.n_steps();
        for (std::int64_t k = 0; k < steps; ++k) {
            s = step(s, rng);
            s.time = (k + 1) * cfg_.dt;  // avoid accumulating rounding in time
            if (observer) observer(s);
        }
        return s;
    }

  private:
    std::vector<double> substep(const std::vector<double>& xs, double dt, Rng& rng,
                                int depth) const {
        const std::vector<double> d = drift(xs);
        std::normal_distribution<double> gauss(0.0, 1.0);
        const double sig = cfg_.zero_noise ? 0.0 : std::sqrt(dt);
        std::vector<double> prop(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            prop[i] = xs[i] + d[i] * dt + sig * gauss(rng);
        std::sort(prop.begin(), prop.end());
        if (prop.empty() || min_gap(prop) >= cfg_.collision_floor) return prop;
        if (depth >= cfg_.max_halvings)
            throw CollisionError("collision persists after maximal step halving");
        const std::vector<double> half = substep(xs, 0.5 * dt, rng, depth + 1);
        return substep(half, 0.5 * dt, rng, depth + 1);
    }

    KernelModel kernel_;
    DiffusionConfig cfg_;
};

// Start-versus-end comparison over an ensemble of trajectories started from
// the kernel's own law. Per-bin occupancies and nearest-neighbor gaps at t=0
// and t=T are compared; for a drift matching the kernel the law is invariant
// and all z-scores should be noise.
struct StationarityReport {
    std::vector<double> bin_edges;
    std::vector<double> z_scores;        // per bin
    std::vector<double> occupancy_start; // mean per-trajectory count per bin
    std::vector<double> occupancy_end;
    double max_abs_z = 0.0;
    double gap_distance = 0.0;           // KS distance between gap samples
    double collision_rate = 0.0;
    std::int64_t n_trajectories = 0;
    bool stationary = false;             // max |z| < 3 and collisions <= 1%
};

namespace detail {

// Smallest centered-mass interval: cut where the discretized intensity mass
// drops below tail_mass on each side.
inline std::pair<double, double> bulk_range(const DiscretizedKernel& disc,
                                            double tail_mass = 5e-4) {
    const int n = disc.n();
    std::vector<double> mass(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
        mass[i] = disc.weights[i] * std::max(0.0, disc.matrix(i, i)) /
                  (disc.sqrt_w[i] * disc.sqrt_w[i]);
        total += mass[i];
    }
    if (!(total > 0.0)) return {disc.window.lo, disc.window.hi};
    double lo = disc.window.lo, hi = disc.window.hi, acc = 0.0;
    for (int i = 0; i < n; ++i) {
        acc += mass[i];
        if (acc >= tail_mass * total) { lo = disc.nodes[i]; break; }
    }
    acc = 0.0;
    for (int i = n - 1; i >= 0; --i) {
        acc += mass[i];
        if (acc >= tail_mass * total) { hi = disc.nodes[i]; break; }
    }
    if (!(lo < hi)) { lo = disc.window.lo; hi = disc.window.hi; }
    return {lo, hi};
}

inline double ks_distance(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) return 0.0;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        // consume ties on both sides before measuring, otherwise identical
        // samples report a spurious 1/n gap
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == x) ++i;
        while (j < b.size() && b[j] == x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace detail

inline StationarityReport stationarity_run(const KernelModel& kernel,
                                           const DiffusionConfig& cfg, std::int64_t n_traj,
                                           std::uint64_t seed, int workers = 1,
                                           int n_bins = 12,
                                           int n_nodes = defaults::n_nodes) {
    if (n_traj < 2) throw PreconditionError("stationarity_run: need at least two trajectories");
    if (n_bins < 2) throw PreconditionError("stationarity_run: need at least two bins");
    const Diffusion dyn(kernel, cfg);
    const DiscretizedKernel disc = discretize(kernel, n_nodes);
    const auto [blo, bhi] = detail::bulk_range(disc);
    std::vector<double> edges(n_bins + 1);
    for (int b = 0; b <= n_bins; ++b) edges[b] = blo + (bhi - blo) * b / n_bins;

    struct Accum {
        std::vector<RunningStat> start, end;
        std::vector<double> gaps_start, gaps_end;
        std::int64_t aborted = 0;
        void merge(const Accum& o) {
            for (std::size_t b = 0; b < start.size(); ++b) {
                start[b].merge(o.start[b]);
                end[b].merge(o.end[b]);
            }
            gaps_start.insert(gaps_start.end(), o.gaps_start.begin(), o.gaps_start.end());
            gaps_end.insert(gaps_end.end(), o.gaps_end.begin(), o.gaps_end.end());
            aborted += o.aborted;
        }
    };

    auto bin_counts = [&](const std::vector<double>& xs) {
        std::vector<double> c(n_bins, 0.0);
        for (double x : xs) {
            if (x < blo || x >= bhi) continue;
            int b = static_cast<int>((x - blo) / (bhi - blo) * n_bins);
            b = std::min(std::max(b, 0), n_bins - 1);
            c[b] += 1.0;
        }
        return c;
    };

    auto work = [&](int /*worker*/, std::int64_t count, Rng& rng) {
        Accum acc;
        acc.start.resize(n_bins);
        acc.end.resize(n_bins);
        for (std::int64_t t = 0; t < count; ++t) {
            const Configuration X0 = sample_dpp(disc, rng);
            DiffusionState s0{X0.points, 0.0};
            if (min_gap(s0.xs) < cfg.collision_floor) {
                ++acc.aborted;  // freak initial sample, drop it
                continue;
            }
            DiffusionState sT;
            try {
                sT = dyn.run(s0, rng);
            } catch (const CollisionError&) {
                ++acc.aborted;
                continue;
            }
            const std::vector<double> c0 = bin_counts(s0.xs);
            const std::vector<double> cT = bin_counts(sT.xs);
            for (int b = 0; b < n_bins; ++b) {
                acc.start[b].add(c0[b]);
                acc.end[b].add(cT[b]);
            }
            for (std::size_t i = 0; i + 1 < s0.xs.size(); ++i)
                acc.gaps_start.push_back(s0.xs[i + 1] - s0.xs[i]);
            for (std::size_t i = 0; i + 1 < sT.xs.size(); ++i)
                acc.gaps_end.push_back(sT.xs[i + 1] - sT.xs[i]);
        }
        return acc;
    };
    const Accum acc = parallel_map_reduce<Accum>(
        n_traj, workers, seed, work, [](Accum& a, const Accum& b) { a.merge(b); });

    StationarityReport rep;
    rep.bin_edges = edges;
    rep.n_trajectories = n_traj;
    rep.collision_rate = static_cast<double>(acc.aborted) / n_traj;
    rep.z_scores.resize(n_bins, 0.0);
    rep.occupancy_start.resize(n_bins, 0.0);
    rep.occupancy_end.resize(n_bins, 0.0);
    for (int b = 0; b < n_bins; ++b) {
        const Estimate e0 = acc.start[b].mean_estimate();
        const Estimate eT = acc.end[b].mean_estimate();
        rep.occupancy_start[b] = e0.value;
        rep.occupancy_end[b] = eT.value;
        const double se = std::sqrt(e0.std_err * e0.std_err + eT.std_err * eT.std_err);
        rep.z_scores[b] = se > 0.0 ? (eT.value - e0.value) / se : 0.0;
        rep.max_abs_z = std::max(rep.max_abs_z, std::abs(rep.z_scores[b]));
    }
    rep.gap_distance = detail::ks_distance(acc.gaps_start, acc.gaps_end);
    rep.stationary = rep.max_abs_z < 3.0 && rep.collision_rate <= 0.01;
    return rep;
}

}  // namespace dpp
