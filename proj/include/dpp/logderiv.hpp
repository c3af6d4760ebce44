#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dpp/configuration.hpp"
#include "dpp/defaults.hpp"
#include "dpp/discretize.hpp"
#include "dpp/errors.hpp"
#include "dpp/estimate.hpp"
#include "dpp/functionals.hpp"
#include "dpp/kernel.hpp"
#include "dpp/palm.hpp"
#include "dpp/parallel.hpp"
#include "dpp/sampler.hpp"
#include "dpp/window.hpp"

namespace dpp {

// Ordered list of (R, delta) cutoffs walked during extrapolation. Radii may
// not shrink and collars may not grow; repeats are allowed (they give a zero
// Cauchy gap). Radii are clamped to the window half-width before use, since
// points beyond the window cannot occur anyway.
class RegularizationSchedule {
  public:
    explicit RegularizationSchedule(std::vector<std::pair<double, double>> pairs)
        : pairs_(std::move(pairs)) {
        if (pairs_.size() < 2)
            throw PreconditionError("RegularizationSchedule: need at least two cutoff pairs");
        for (std::size_t i = 0; i < pairs_.size(); ++i) {
            if (!(pairs_[i].first > 0.0))
                throw PreconditionError("RegularizationSchedule: radii must be positive");
            if (!(pairs_[i].second > 0.0 && pairs_[i].second < 1.0))
                throw PreconditionError("RegularizationSchedule: collars must lie in (0,1)");
            if (i > 0 && pairs_[i].first < pairs_[i - 1].first)
                throw PreconditionError("RegularizationSchedule: radii must not decrease");
            if (i > 0 && pairs_[i].second > pairs_[i - 1].second)
                throw PreconditionError("RegularizationSchedule: collars must not grow");
        }
    }

    RegularizationSchedule clamped_to(const Window& w) const {
        std::vector<std::pair<double, double>> p = pairs_;
        for (auto& [R, d] : p) R = std::min(R, w.half_width());
        return RegularizationSchedule(std::move(p));
    }

    const std::vector<std::pair<double, double>>& pairs() const { return pairs_; }
    std::size_t size() const { return pairs_.size(); }
    const std::pair<double, double>& back() const { return pairs_.back(); }

  private:
    std::vector<std::pair<double, double>> pairs_;
};

struct LogDerivEstimate {
    std::vector<double> values;  // one per schedule pair
    double extrapolated = 0.0;   // value at the finest pair
    double cauchy_gap = 0.0;     // |last - previous|
    bool converged = false;      // cauchy_gap < conv_tol
};

// Log-derivative of the reduced measure at a fixed anchor:
//   d(a, X) = (ln rho)'(a) + lim [ S^{R,delta}_a(X) - E^a S^{R,delta}_a ]
// walked along a schedule. The anchor-dependent pieces (intensity term and
// the quadrature expectations) are precomputed so per-configuration cost is
// one pass over the points per pair.
class LogDerivative {
  public:
    LogDerivative(const KernelModel& kernel, double anchor,
                  const RegularizationSchedule& schedule, int n_per_piece = 48)
        : anchor_(anchor),
          schedule_(schedule.clamped_to(kernel.window())),
          intensity_term_(kernel.intensity_log_derivative(anchor)) {
        const PalmKernel reduced = palm_reduce(kernel, anchor);
        for (const auto& [R, delta] : schedule_.pairs()) {
            specs_.emplace_back(R, delta, anchor);
            expected_.push_back(expected_regularized_coulomb(reduced, specs_.back(), n_per_piece));
        }
    }

    double anchor() const { return anchor_; }
    double intensity_term() const { return intensity_term_; }
    const RegularizationSchedule& schedule() const { return schedule_; }
    double expected_coulomb(std::size_t i) const { return expected_.at(i); }

    double pair_value(std::size_t i, const Configuration& config) const {
        return intensity_term_ + regularized_coulomb(specs_.at(i), config) - expected_.at(i);
    }

    LogDerivEstimate evaluate(const Configuration& config) const {
        LogDerivEstimate out;
        out.values.reserve(specs_.size());
        for (std::size_t i = 0; i < specs_.size(); ++i)
            out.values.push_back(pair_value(i, config));
        out.extrapolated = out.values.back();
        out.cauchy_gap = std::abs(out.values.back() - out.values[out.values.size() - 2]);
        out.converged = out.cauchy_gap < defaults::conv_tol;
        return out;
    }

  private:
    double anchor_;
    RegularizationSchedule schedule_;
    double intensity_term_;
    std::vector<CutoffSpec> specs_;
    std::vector<double> expected_;
};

inline LogDerivEstimate log_derivative(const KernelModel& kernel, double anchor,
                                       const RegularizationSchedule& schedule,
                                       const Configuration& config, int n_per_piece = 48) {
    return LogDerivative(kernel, anchor, schedule, n_per_piece).evaluate(config);
}

// Change-of-measure factor between the reduced measures at two nearby anchors:
// the truncated product of ((x-b)/(x-a))^2 over kept points, divided by its
// Monte Carlo mean over the supplied anchor-a samples so the normalized
// factor averages to exactly 1 in-sample.
class RadonNikodymFactor {
  public:
    RadonNikodymFactor(double a, double b, double R, double delta,
                       const std::vector<Configuration>& samples_at_a)
        : spec_(R, delta, a, b), a_(a), b_(b) {
        if (!(std::abs(b - a) <= defaults::vartheta))
            throw PreconditionError("RadonNikodymFactor: anchors too far apart");
        if (samples_at_a.empty())
            throw PreconditionError("RadonNikodymFactor: need at least one sample");
        RunningStat stat;
        for (const auto& X : samples_at_a) stat.add(raw(X));
        normalizer_ = stat.mean_estimate();
        if (!(normalizer_.value > 0.0) ||
            normalizer_.rel_stderr() > defaults::normalizer_rel_stderr)
            throw DegenerateError("RadonNikodymFactor: normalizer too noisy");
    }

    // Unnormalized truncated product. Kept points stay a collar away from
    // both anchors, so each factor is finite and positive.
    double raw(const Configuration& config) const {
        if (b_ == a_) return 1.0;
        double p = 1.0;
        for (double x : config.points) {
            if (!spec_.keeps_pair(x)) continue;
            const double r = (x - b_) / (x - a_);
            p *= r * r;
        }
        return p;
    }

    double operator()(const Configuration& config) const { return raw(config) / normalizer_.value; }

    Estimate normalizer() const { return normalizer_; }
    const CutoffSpec& cutoff() const { return spec_; }

  private:
    CutoffSpec spec_;
    double a_, b_;
    Estimate normalizer_;
};

// Derivative of the log normalization constant along the anchor shift:
//   (d/d eps) ln C(eps) = -E^a[ psi_bar * S^{R,delta}_{a,a+eps} ]
// estimated self-normalized over reduced-measure samples at a, with the
// delta-method standard error for the ratio. At eps = 0 the factor is 1 and
// this reduces to minus the plain mean of the pair sum.
inline Estimate dlnC_derivative(double a, double eps, double R, double delta,
                                const std::vector<Configuration>& samples_at_a) {
    if (samples_at_a.size() < 2)
        throw PreconditionError("dlnC_derivative: need at least two samples");
    const double b = a + eps;
    const CutoffSpec spec(R, delta, a, b);
    if (!(std::abs(eps) <= defaults::vartheta))
        throw PreconditionError("dlnC_derivative: anchor shift too large");
    PairedStat stat;
    for (const auto& X : samples_at_a) {
        double w = 1.0;
        if (eps != 0.0) {
            for (double x : X.points) {
                if (!spec.keeps_pair(x)) continue;
                const double r = (x - b) / (x - a);
                w *= r * r;
            }
        }
        const double s = regularized_coulomb_pair(spec, X);
        stat.add(w * s, w);
    }
    Estimate ratio = stat.ratio_estimate();
    return Estimate{-ratio.value, ratio.std_err, ratio.n};
}

// Smooth weight in the anchor paired with a bounded configuration statistic.
struct ProductObservable {
    std::string name = "observable";
    double support_lo = -1.0;
    double support_hi = 1.0;
    std::function<double(double)> chi;        // smooth, supported in [lo, hi]
    std::function<double(double)> dchi;       // its derivative
    std::function<double(const Configuration&)> psi;  // bounded statistic
};

struct IbpResult {
    Estimate lhs;       // E[ chi'(a) psi(X) ] under the anchor-weighted law
    Estimate rhs;       // -E[ d(a, X) chi(a) psi(X) ]
    Estimate gap;       // paired difference lhs - rhs
    double z = 0.0;     // |gap| / stderr(gap)
    double scale = 0.0; // mass of the anchor sampling density
    std::int64_t n = 0;
};

// Integration-by-parts consistency check over a battery of observables that
// share one support box. Anchors are drawn with density proportional to rho_1
// on that box (a flat weight keeps the per-sample integrands bounded even
// where chi vanishes), configurations from the reduced measure at the anchor,
// and both sides of
//   E[ chi'(a) psi(X) ] = -E[ d(a,X) chi(a) psi(X) ]
// are averaged with a paired z-score on the difference. The log-derivative is
// evaluated at the finest schedule pair and shared across the battery, which
// is the expensive part of each sample.
inline std::vector<IbpResult> ibp_test_battery(
    const KernelModel& kernel, const DiscretizedKernel& disc,
    const std::vector<ProductObservable>& battery, const RegularizationSchedule& schedule,
    std::int64_t n_samples, std::uint64_t seed, int workers = 1, int n_per_piece = 32) {
    if (battery.empty()) throw PreconditionError("ibp_test: need at least one observable");
    if (n_samples < 2) throw PreconditionError("ibp_test: need at least two samples");
    for (const auto& obs : battery)
        if (obs.support_lo != battery.front().support_lo ||
            obs.support_hi != battery.front().support_hi)
            throw PreconditionError("ibp_test: battery must share one support box");
    const auto [R0, delta] = schedule.clamped_to(kernel.window()).back();
    const double R = R0;
    const double amax = std::max(std::abs(battery.front().support_lo),
                                 std::abs(battery.front().support_hi));
    if (!(R > amax + 1.0))
        throw PreconditionError("ibp_test: finest radius too small for the observable support");

    SupportedFn box;
    box.f = [](double) { return 1.0; };
    box.lo = battery.front().support_lo;
    box.hi = battery.front().support_hi;
    const CampbellSampler sampler(kernel, disc, box);
    const std::size_t m = battery.size();

    struct Triple {
        RunningStat lhs, rhs, diff;
    };
    struct Accum {
        std::vector<Triple> per_obs;
        void merge(const Accum& o) {
            for (std::size_t i = 0; i < per_obs.size(); ++i) {
                per_obs[i].lhs.merge(o.per_obs[i].lhs);
                per_obs[i].rhs.merge(o.per_obs[i].rhs);
                per_obs[i].diff.merge(o.per_obs[i].diff);
            }
        }
    };

    auto work = [&](int /*worker*/, std::int64_t count, Rng& rng) {
        Accum acc;
        acc.per_obs.resize(m);
        for (std::int64_t s = 0; s < count; ++s) {
            const CampbellSample cs = sampler.sample(rng);
            const double a = cs.anchor;
            const CutoffSpec spec(R, delta, a);
            const PalmKernel reduced = palm_reduce(kernel, a);
            const double d = kernel.intensity_log_derivative(a) +
                             regularized_coulomb(spec, cs.config) -
                             expected_regularized_coulomb(reduced, spec, n_per_piece);
            for (std::size_t i = 0; i < m; ++i) {
                const double psi = battery[i].psi(cs.config);
                const double ul = battery[i].dchi(a) * psi;
                const double ur = -d * battery[i].chi(a) * psi;
                acc.per_obs[i].lhs.add(ul);
                acc.per_obs[i].rhs.add(ur);
                acc.per_obs[i].diff.add(ul - ur);
            }
        }
        return acc;
    };
    const Accum acc = parallel_map_reduce<Accum>(
        n_samples, workers, seed, work, [](Accum& a, const Accum& b) { a.merge(b); });

    const double scale = sampler.normalizer();
    std::vector<IbpResult> results;
    results.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        IbpResult out;
        const Estimate l = acc.per_obs[i].lhs.mean_estimate();
        const Estimate r = acc.per_obs[i].rhs.mean_estimate();
        const Estimate g = acc.per_obs[i].diff.mean_estimate();
        out.lhs = Estimate{scale * l.value, scale * l.std_err, l.n};
        out.rhs = Estimate{scale * r.value, scale * r.std_err, r.n};
        out.gap = Estimate{scale * g.value, scale * g.std_err, g.n};
        out.z = g.std_err > 0.0 ? std::abs(g.value) / g.std_err : 0.0;
        out.scale = scale;
        out.n = n_samples;
        results.push_back(out);
    }
    return results;
}

inline IbpResult ibp_test(const KernelModel& kernel, const DiscretizedKernel& disc,
                          const ProductObservable& obs,
                          const RegularizationSchedule& schedule, std::int64_t n_samples,
                          std::uint64_t seed, int workers = 1, int n_per_piece = 32) {
    return ibp_test_battery(kernel, disc, {obs}, schedule, n_samples, seed, workers,
                            n_per_piece).front();
}

struct DiffQuotientPoint {
    double eps = 0.0;
    double l2_gap = 0.0;  // root mean square of (psi_bar - 1)/eps - S_bar
};

// Compares the difference quotient of the normalized change-of-measure factor
// against the centered Coulomb sum, its formal derivative in the shift. The
// shifts must be positive; the gap should shrink with eps until Monte Carlo
// noise takes over.
inline std::vector<DiffQuotientPoint> rn_difference_quotient_check(
    const KernelModel& kernel, double a, double R, double delta,
    std::vector<double> eps_list, const std::vector<Configuration>& samples_at_a,
    int n_per_piece = 48) {
    if (samples_at_a.empty())
        throw PreconditionError("rn_difference_quotient_check: need samples");
    for (double e : eps_list)
        if (!(e > 0.0))
            throw PreconditionError("rn_difference_quotient_check: shifts must be positive");
    std::sort(eps_list.rbegin(), eps_list.rend());

    const PalmKernel reduced = palm_reduce(kernel, a);
    const CutoffSpec spec(R, delta, a);
    const double expected = expected_regularized_coulomb(reduced, spec, n_per_piece);
    std::vector<double> centered;
    centered.reserve(samples_at_a.size());
    for (const auto& X : samples_at_a)
        centered.push_back(regularized_coulomb(spec, X) - expected);

    std::vector<DiffQuotientPoint> out;
    for (double eps : eps_list) {
        const RadonNikodymFactor rn(a, a + eps, R, delta, samples_at_a);
        double ss = 0.0;
        for (std::size_t i = 0; i < samples_at_a.size(); ++i) {
            const double q = (rn(samples_at_a[i]) - 1.0) / eps;
            const double d = q - centered[i];
            ss += d * d;
        }
        out.push_back({eps, std::sqrt(ss / samples_at_a.size())});
    }
    return out;
}

}  // namespace dpp
