#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "dpp/configuration.hpp"
#include "dpp/defaults.hpp"
#include "dpp/discretize.hpp"
#include "dpp/dynamics.hpp"
#include "dpp/errors.hpp"
#include "dpp/estimate.hpp"
#include "dpp/functionals.hpp"
#include "dpp/io.hpp"
#include "dpp/kernel.hpp"
#include "dpp/logderiv.hpp"
#include "dpp/palm.hpp"
#include "dpp/parallel.hpp"
#include "dpp/sampler.hpp"

namespace dpp {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    bool quick = false;   // reduced sample counts, same pass conditions
    int workers = 1;
    std::uint64_t seed = 31415;
};

namespace detail {

inline std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

class StopWatch {
  public:
    StopWatch() : t0_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0_).count();
    }

  private:
    std::chrono::steady_clock::time_point t0_;
};

// Smooth bump weight with analytic derivative, for the anchor side of the
// product observables.
inline ProductObservable bump_observable(double center, double width, double box_lo,
                                         double box_hi,
                                         std::function<double(const Configuration&)> psi,
                                         std::string name) {
    ProductObservable obs;
    obs.name = std::move(name);
    obs.support_lo = box_lo;
    obs.support_hi = box_hi;
    obs.chi = [center, width](double x) {
        const double u = (x - center) / width;
        if (std::abs(u) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u * u));
    };
    obs.dchi = [center, width](double x) {
        const double u = (x - center) / width;
        if (std::abs(u) >= 1.0) return 0.0;
        const double den = 1.0 - u * u;
        return std::exp(1.0 - 1.0 / den) * (-2.0 * u / (den * den)) / width;
    };
    obs.psi = std::move(psi);
    return obs;
}

// --- criterion 1: additive variance isometry ---------------------------------

// Panels with edges at the given interior breakpoints. Aligning panel edges
// with the jumps and kinks of the test functions keeps the discretized
// process's counting statistics spectrally accurate; a uniform rule would
// resolve an indicator's edge only to one node spacing and bias its variance.
inline std::vector<Panel> aligned_panels(const Window& w, std::vector<double> edges,
                                         double nodes_per_unit) {
    edges.push_back(w.lo);
    edges.push_back(w.hi);
    std::sort(edges.begin(), edges.end());
    std::vector<Panel> panels;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const double lo = std::max(edges[i], w.lo);
        const double hi = std::min(edges[i + 1], w.hi);
        if (!(hi - lo > 1e-9)) continue;
        const int n = std::max(8, static_cast<int>(std::ceil(nodes_per_unit * (hi - lo))));
        panels.push_back({lo, hi, n});
    }
    return panels;
}

inline CriterionResult criterion_isometry(const AcceptanceOptions& opt) {
    CriterionResult res{1, "additive variance isometry", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_samples = opt.quick ? 2000 : 20000;

    std::vector<TestFn> battery = {indicator_fn(-1.0, 1.0), indicator_fn(-1.7, 0.3),
                                   gaussian_fn(0.0, 0.7), bump_fn(0.5, 1.2),
                                   hat_fn(0.3, 1.0)};
    // jumps, kinks, and compact-support edges of the battery above
    const std::vector<double> battery_edges = {-1.7, -1.0, -0.7, 0.3, 1.0, 1.3, 1.7};

    struct Combo {
        std::string name;
        KernelModel sample_kernel;
        KernelModel oracle_kernel;  // wide window so the seminorm sees the full norm
        double nodes_per_unit;
    };
    const std::vector<Combo> combos = {
        {"sine", KernelModel::sine(Window{-24.0, 24.0}),
         KernelModel::sine(Window{-128.0, 128.0}), 5.0},
        {"hermite5", KernelModel::hermite(5, Window{-8.0, 8.0}),
         KernelModel::hermite(5, Window{-8.0, 8.0}), 12.5},
    };

    bool all_ok = true;
    std::ostringstream det;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        const Combo& combo = combos[c];
        const DiscretizedKernel disc =
            discretize(combo.sample_kernel,
                       aligned_panels(combo.sample_kernel.window(), battery_edges,
                                      combo.nodes_per_unit));

        struct Accum {
            std::vector<RunningStat> stats;
        };
        auto work = [&](int, std::int64_t count, Rng& rng) {
            Accum acc;
            acc.stats.resize(battery.size());
            for (std::int64_t s = 0; s < count; ++s) {
                const Configuration X = sample_dpp(disc, rng);
                for (std::size_t f = 0; f < battery.size(); ++f)
                    acc.stats[f].add(additive(battery[f], X));
            }
            return acc;
        };
        const Accum acc = parallel_map_reduce<Accum>(
            n_samples, opt.workers, opt.seed + 100 + c, work,
            [](Accum& a, const Accum& b) {
                for (std::size_t f = 0; f < a.stats.size(); ++f) a.stats[f].merge(b.stats[f]);
            });

        double worst = 0.0;
        for (std::size_t f = 0; f < battery.size(); ++f) {
            const Estimate var = acc.stats[f].variance_estimate();
            const double oracle = variance_norm_sq(battery[f], combo.oracle_kernel, 24);
            const double ratio = std::abs(var.value - oracle) / var.std_err;
            worst = std::max(worst, ratio);
            if (ratio > 3.0) all_ok = false;
        }
        det << (c ? "; " : "") << combo.name << " max|dev|/se=" << fmt3(worst);
    }
    res.pass = all_ok;
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 2: Palm reduction drops exactly one particle ------------------

inline CriterionResult criterion_palm(const AcceptanceOptions& opt) {
    CriterionResult res{2, "Palm cardinality and anchor repulsion", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_samples = opt.quick ? 1000 : 10000;
    const int n_hermite = 6;
    const double anchor = 0.37;
    const int n_bins = 25;
    const double half_span = 2.5;

    const KernelModel kernel = KernelModel::hermite(n_hermite, Window{-8.0, 8.0});
    const DiscretizedKernel disc = discretize(kernel, 200);
    const PalmSampler palm(kernel, disc);

    struct Accum {
        std::int64_t wrong_cardinality = 0;
        std::vector<double> bins;
    };
    auto work = [&](int, std::int64_t count, Rng& rng) {
        Accum acc;
        acc.bins.assign(n_bins, 0.0);
        const PalmSampler::Basis basis = palm.prepare(anchor);
        for (std::int64_t s = 0; s < count; ++s) {
            const Configuration X = palm.sample_with(basis, rng);
            if (static_cast<int>(X.size()) != n_hermite - 1) ++acc.wrong_cardinality;
            for (double x : X.points) {
                const double u = (x - (anchor - half_span)) / (2.0 * half_span) * n_bins;
                if (u >= 0.0 && u < n_bins) acc.bins[static_cast<int>(u)] += 1.0;
            }
        }
        return acc;
    };
    const Accum acc = parallel_map_reduce<Accum>(
        n_samples, opt.workers, opt.seed + 200, work, [](Accum& a, const Accum& b) {
            a.wrong_cardinality += b.wrong_cardinality;
            for (std::size_t i = 0; i < a.bins.size(); ++i) a.bins[i] += b.bins[i];
        });

    const int inner = n_bins / 2;  // bin centered on the anchor
    double peak = 0.0;
    for (double v : acc.bins) peak = std::max(peak, v);
    const double inner_frac = peak > 0.0 ? acc.bins[inner] / peak : 1.0;

    res.pass = acc.wrong_cardinality == 0 && inner_frac < 0.05;
    std::ostringstream det;
    det << "wrong_cardinality=" << acc.wrong_cardinality << "/" << n_samples
        << "; inner/peak=" << fmt3(inner_frac);
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 3: regularized Coulomb convergence across the schedule --------

inline CriterionResult criterion_coulomb_convergence(const AcceptanceOptions& opt) {
    CriterionResult res{3, "regularized Coulomb L2 convergence", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_samples = opt.quick ? 500 : 3000;
    const double anchor = 0.3;
    const std::vector<double> widths = {10.0, 20.0, 40.0};
    const std::vector<std::pair<double, double>> base_pairs = {
        {5.0, 0.2}, {10.0, 0.1}, {20.0, 0.05}};

    bool all_ok = true;
    std::ostringstream det;
    for (std::size_t wi = 0; wi < widths.size(); ++wi) {
        const double W = widths[wi];
        const KernelModel kernel = KernelModel::sine(Window{-W, W});
        // Fine nodes around the anchor so jitter cells resolve the collar.
        const std::vector<Panel> panels = {
            {-W, anchor - 0.5, static_cast<int>(std::ceil(8.0 * (W + anchor - 0.5)))},
            {anchor - 0.5, anchor + 0.5, 80},
            {anchor + 0.5, W, static_cast<int>(std::ceil(8.0 * (W - anchor - 0.5)))}};
        const DiscretizedKernel disc = discretize(kernel, panels);
        const RegularizationSchedule schedule =
            RegularizationSchedule(base_pairs).clamped_to(kernel.window());

        const PalmKernel reduced = palm_reduce(kernel, anchor);
        std::vector<CutoffSpec> specs;
        std::vector<double> expected;
        for (const auto& [R, d] : schedule.pairs()) {
            specs.emplace_back(R, d, anchor);
            expected.push_back(expected_regularized_coulomb(reduced, specs.back()));
        }

        const PalmSampler palm(kernel, disc);
        struct Accum {
            RunningStat last, gap1_sq, gap2_sq;
        };
        auto work = [&](int, std::int64_t count, Rng& rng) {
            Accum acc;
            const PalmSampler::Basis basis = palm.prepare(anchor);
            for (std::int64_t s = 0; s < count; ++s) {
                const Configuration X = palm.sample_with(basis, rng);
                double v[3];
                for (int i = 0; i < 3; ++i)
                    v[i] = regularized_coulomb(specs[i], X) - expected[i];
                acc.last.add(v[2]);
                acc.gap1_sq.add((v[1] - v[0]) * (v[1] - v[0]));
                acc.gap2_sq.add((v[2] - v[1]) * (v[2] - v[1]));
            }
            return acc;
        };
        const Accum acc = parallel_map_reduce<Accum>(
            n_samples, opt.workers, opt.seed + 300 + wi, work,
            [](Accum& a, const Accum& b) {
                a.last.merge(b.last);
                a.gap1_sq.merge(b.gap1_sq);
                a.gap2_sq.merge(b.gap2_sq);
            });

        const double gap1 = std::sqrt(std::max(0.0, acc.gap1_sq.mean()));
        const double gap2 = std::sqrt(std::max(0.0, acc.gap2_sq.mean()));
        const Estimate var = acc.last.variance_estimate();

        // Seminorm of the finest cutoff summand under the reduced kernel on a
        // wide domain, the norm the truncation converges in.
        const PalmKernel wide =
            palm_reduce(KernelModel::sine(Window{-64.0, 64.0}), anchor);
        const double oracle = variance_norm_sq(coulomb_test_fn(specs[2]), wide, 24);

        const double ratio = std::abs(var.value - oracle) / var.std_err;
        const bool ok = gap2 < gap1 && ratio <= 3.0;
        if (!ok) all_ok = false;
        det << (wi ? "; " : "") << "W=" << W << " gaps=" << fmt3(gap1) << ">" << fmt3(gap2)
            << " |var-oracle|/se=" << fmt3(ratio);
    }
    res.pass = all_ok;
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 4: finite-N closed-form oracle --------------------------------

inline CriterionResult criterion_finite_oracle(const AcceptanceOptions& opt) {
    CriterionResult res{4, "finite-N log-derivative closed form", false, "", 0.0};
    StopWatch clock;
    const int n_pairs = opt.quick ? 20 : 100;
    const std::vector<int> orders = {2, 4, 8};
    const RegularizationSchedule schedule({{6.5, 0.002}, {7.5, 0.001}});
    const double delta_fine = schedule.back().second;

    bool all_ok = true;
    double worst = 0.0;
    for (std::size_t oi = 0; oi < orders.size(); ++oi) {
        const int N = orders[oi];
        const KernelModel kernel = KernelModel::hermite(N, Window{-8.0, 8.0});
        const DiscretizedKernel disc = discretize(kernel, 200);
        const PalmSampler palm(kernel, disc);
        Rng rng = make_stream(opt.seed + 400, oi);
        std::uniform_real_distribution<double> anchor_draw(-2.0, 2.0);

        for (int p = 0; p < n_pairs; ++p) {
            double a = 0.0;
            Configuration X;
            bool fine = false;
            for (int attempt = 0; attempt < 100 && !fine; ++attempt) {
                a = anchor_draw(rng);
                X = palm.sample(a, rng);
                fine = true;
                for (double x : X.points)
                    if (std::abs(x) > 7.4 || std::abs(x - a) < 10.0 * delta_fine) fine = false;
            }
            if (!fine) { all_ok = false; continue; }

            const LogDerivative ld(kernel, a, schedule);
            const double estimate = ld.evaluate(X).extrapolated;
            double oracle = -2.0 * a;
            for (double x : X.points) oracle += 2.0 / (a - x);
            worst = std::max(worst, std::abs(estimate - oracle));
        }
    }
    res.pass = all_ok && worst < 1e-4;
    res.detail = "max|estimate-closed form|=" + fmt3(worst);
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 5: integration by parts ---------------------------------------

inline CriterionResult criterion_ibp(const AcceptanceOptions& opt) {
    CriterionResult res{5, "integration by parts identity", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_samples = opt.quick ? 5000 : 100000;

    auto count_psi = [](double lo, double hi) {
        return [lo, hi](const Configuration& X) {
            return std::exp(-static_cast<double>(count_in(X, lo, hi)));
        };
    };
    auto inv_count_psi = [](double lo, double hi) {
        return [lo, hi](const Configuration& X) {
            return 1.0 / (1.0 + static_cast<double>(count_in(X, lo, hi)));
        };
    };
    auto smooth_psi = [](double center, double width) {
        return [center, width](const Configuration& X) {
            double s = 0.0;
            for (double x : X.points) {
                const double u = (x - center) / width;
                s += std::exp(-0.5 * u * u);
            }
            return std::exp(-s);
        };
    };
    const std::vector<ProductObservable> battery = {
        bump_observable(0.0, 1.0, -1.0, 1.0, count_psi(0.5, 1.5), "exp_neg_count"),
        bump_observable(0.3, 0.6, -1.0, 1.0, inv_count_psi(-2.0, -0.5), "inv_count"),
        bump_observable(-0.2, 0.8, -1.0, 1.0, smooth_psi(1.2, 0.5), "exp_neg_smooth"),
    };

    struct Combo {
        std::string name;
        KernelModel kernel;
        int n_nodes;
        RegularizationSchedule schedule;
    };
    const std::vector<Combo> combos = {
        {"sine", KernelModel::sine(Window{-16.0, 16.0}), 256,
         RegularizationSchedule({{8.0, 0.2}, {12.0, 0.1}, {16.0, 0.05}})},
        {"hermite4", KernelModel::hermite(4, Window{-8.0, 8.0}), 200,
         RegularizationSchedule({{6.0, 0.2}, {7.0, 0.1}, {8.0, 0.05}})},
        {"hermite8", KernelModel::hermite(8, Window{-8.0, 8.0}), 200,
         RegularizationSchedule({{6.0, 0.2}, {7.0, 0.1}, {8.0, 0.05}})},
    };

    bool all_ok = true;
    std::ostringstream det;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        const Combo& combo = combos[c];
        const DiscretizedKernel disc = discretize(combo.kernel, combo.n_nodes);
        const std::vector<IbpResult> results =
            ibp_test_battery(combo.kernel, disc, battery, combo.schedule, n_samples,
                             opt.seed + 500 + c, opt.workers);
        double worst = 0.0;
        for (const auto& r : results) {
            worst = std::max(worst, r.z);
            if (r.z >= 3.0) all_ok = false;
        }
        det << (c ? "; " : "") << combo.name << " max z=" << fmt3(worst);
    }
    res.pass = all_ok;
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 6: change of measure between nearby anchors -------------------

inline CriterionResult criterion_change_of_measure(const AcceptanceOptions& opt) {
    CriterionResult res{6, "anchor change of measure", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_samples = opt.quick ? 2000 : 20000;
    const double a = 0.2, b = 0.3, delta = 0.1;

    struct Phi {
        std::string name;
        std::function<double(const Configuration&)> f;
    };
    auto smooth_sum = [](double center, double width) {
        return [center, width](const Configuration& X) {
            double s = 0.0;
            for (double x : X.points) {
                const double u = (x - center) / width;
                s += std::exp(-0.5 * u * u);
            }
            return std::exp(-s);
        };
    };
    const std::vector<Phi> phis = {
        {"exp_neg_count", [](const Configuration& X) {
             return std::exp(-static_cast<double>(count_in(X, 0.8, 1.8)));
         }},
        {"inv_count", [](const Configuration& X) {
             return 1.0 / (1.0 + static_cast<double>(count_in(X, -1.5, -0.3)));
         }},
        {"exp_neg_smooth", smooth_sum(0.6, 0.4)},
    };

    struct Combo {
        std::string name;
        KernelModel kernel;
        double R;
    };
    const std::vector<Combo> combos = {
        {"sine", KernelModel::sine(Window{-12.0, 12.0}), 8.0},
        {"hermite6", KernelModel::hermite(6, Window{-8.0, 8.0}), 7.0},
    };

    bool all_ok = true;
    std::ostringstream det;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        const Combo& combo = combos[c];
        const DiscretizedKernel disc = discretize(combo.kernel, 200);
        const PalmSampler palm(combo.kernel, disc);
        Rng rng_a = make_stream(opt.seed + 600 + c, 0);
        Rng rng_b = make_stream(opt.seed + 600 + c, 1);
        const std::vector<Configuration> at_a = palm.sample_many(a, n_samples, rng_a);
        const std::vector<Configuration> at_b = palm.sample_many(b, n_samples, rng_b);

        const RadonNikodymFactor rn(a, b, combo.R, delta, at_a);
        double worst = 0.0;
        for (const auto& phi : phis) {
            RunningStat direct;
            for (const auto& X : at_b) direct.add(phi.f(X));
            PairedStat tilted;
            for (const auto& X : at_a) {
                const double w = rn.raw(X);
                tilted.add(w * phi.f(X), w);
            }
            const Estimate lhs = direct.mean_estimate();
            const Estimate rhs = tilted.ratio_estimate();
            const double se =
                std::sqrt(lhs.std_err * lhs.std_err + rhs.std_err * rhs.std_err);
            const double z = se > 0.0 ? std::abs(lhs.value - rhs.value) / se : 0.0;
            worst = std::max(worst, z);
            if (z >= 3.0) all_ok = false;
        }
        det << (c ? "; " : "") << combo.name << " max z=" << fmt3(worst);
    }
    res.pass = all_ok;
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 7: normalization-constant derivative --------------------------

inline CriterionResult criterion_dlnc(const AcceptanceOptions& opt) {
    CriterionResult res{7, "log normalizer derivative", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_samples = opt.quick ? 2000 : 20000;
    const double eps = 0.05, R = 6.0, delta = 0.1;

    struct Combo {
        std::string name;
        KernelModel kernel;
        double a;
    };
    const std::vector<Combo> combos = {
        {"sine", KernelModel::sine(Window{-12.0, 12.0}), 0.3},
        {"hermite4", KernelModel::hermite(4, Window{-8.0, 8.0}), 0.2},
    };

    bool all_ok = true;
    std::ostringstream det;
    for (std::size_t c = 0; c < combos.size(); ++c) {
        const Combo& combo = combos[c];
        const DiscretizedKernel disc = discretize(combo.kernel, 200);
        const PalmSampler palm(combo.kernel, disc);
        Rng rng = make_stream(opt.seed + 700 + c, 0);
        const std::vector<Configuration> samples =
            palm.sample_many(combo.a, n_samples, rng);

        // ln C(eps) = -ln Z(eps) with Z(0) = 1 exactly, so the finite
        // difference over [0, eps] needs one normalizer estimate.
        const RadonNikodymFactor rn(combo.a, combo.a + eps, R, delta, samples);
        const Estimate z_hat = rn.normalizer();
        const double fd = -std::log(z_hat.value) / eps;
        const double fd_se = z_hat.std_err / (z_hat.value * eps);

        const Estimate mid =
            dlnC_derivative(combo.a, 0.5 * eps, R, delta, samples);
        const double se = std::sqrt(fd_se * fd_se + mid.std_err * mid.std_err);
        const double z = se > 0.0 ? std::abs(fd - mid.value) / se : 0.0;
        if (z >= 3.0) all_ok = false;
        det << (c ? "; " : "") << combo.name << " z=" << fmt3(z);
    }
    res.pass = all_ok;
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

// --- criterion 8: dynamics invariance -----------------------------------------

inline CriterionResult criterion_dynamics(const AcceptanceOptions& opt) {
    CriterionResult res{8, "diffusion invariance", false, "", 0.0};
    StopWatch clock;
    const std::int64_t n_traj = opt.quick ? 150 : 500;
    const KernelModel kernel = KernelModel::hermite(8, Window{-8.0, 8.0});

    DiffusionConfig cfg;
    cfg.dt = 1e-4;
    cfg.t_final = opt.quick ? 0.25 : 0.5;
    cfg.mode = DriftMode::ClosedFormHermite;

    const StationarityReport good =
        stationarity_run(kernel, cfg, n_traj, opt.seed + 800, opt.workers);

    DiffusionConfig wrong = cfg;
    wrong.confinement = 2.0;  // negative control: narrower invariant law
    const StationarityReport bad =
        stationarity_run(kernel, wrong, n_traj, opt.seed + 801, opt.workers);

    res.pass = good.stationary && bad.max_abs_z > 3.0;
    std::ostringstream det;
    det << "max|z|=" << fmt3(good.max_abs_z) << " collisions=" << fmt3(good.collision_rate)
        << "; control max|z|=" << fmt3(bad.max_abs_z);
    res.detail = det.str();
    res.seconds = clock.seconds();
    return res;
}

}  // namespace detail

inline std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opt = {}) {
    std::vector<CriterionResult> results;
    results.push_back(detail::criterion_isometry(opt));
    results.push_back(detail::criterion_palm(opt));
    results.push_back(detail::criterion_coulomb_convergence(opt));
    results.push_back(detail::criterion_finite_oracle(opt));
    results.push_back(detail::criterion_ibp(opt));
    results.push_back(detail::criterion_change_of_measure(opt));
    results.push_back(detail::criterion_dlnc(opt));
    results.push_back(detail::criterion_dynamics(opt));
    return results;
}

inline CriterionResult run_criterion(int id, const AcceptanceOptions& opt = {}) {
    switch (id) {
        case 1: return detail::criterion_isometry(opt);
        case 2: return detail::criterion_palm(opt);
        case 3: return detail::criterion_coulomb_convergence(opt);
        case 4: return detail::criterion_finite_oracle(opt);
        case 5: return detail::criterion_ibp(opt);
        case 6: return detail::criterion_change_of_measure(opt);
        case 7: return detail::criterion_dlnc(opt);
        case 8: return detail::criterion_dynamics(opt);
        default: throw PreconditionError("run_criterion: id must be 1..8");
    }
}

}  // namespace dpp
