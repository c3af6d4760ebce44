#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dpp/configuration.hpp"
#include "dpp/defaults.hpp"
#include "dpp/errors.hpp"
#include "dpp/estimate.hpp"
#include "dpp/kernel.hpp"
#include "dpp/palm.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/window.hpp"

namespace dpp {

// Scalar test function together with the locations where it jumps or kinks,
// so expectation quadratures can split the domain there.
struct TestFn {
    std::function<double(double)> f;
    std::vector<double> breakpoints;
    std::string name = "testfn";

    double operator()(double x) const { return f(x); }
};

// --- a small battery of named test functions --------------------------------

inline TestFn indicator_fn(double lo, double hi) {
    if (!(lo < hi)) throw PreconditionError("indicator_fn: need lo < hi");
    TestFn t;
    t.f = [lo, hi](double x) { return (x >= lo && x < hi) ? 1.0 : 0.0; };
    t.breakpoints = {lo, hi};
    std::ostringstream os;
    os << "indicator:" << lo << ":" << hi;
    t.name = os.str();
    return t;
}

// C^inf bump supported on (c-w, c+w), equal to exp(-1/(1-u^2)+1) at u=(x-c)/w.
inline TestFn bump_fn(double center, double width) {
    if (!(width > 0.0)) throw PreconditionError("bump_fn: need width > 0");
    TestFn t;
    t.f = [center, width](double x) {
        const double u = (x - center) / width;
        if (std::abs(u) >= 1.0) return 0.0;
        return std::exp(1.0 - 1.0 / (1.0 - u * u));
    };
    t.breakpoints = {};  // smooth everywhere
    std::ostringstream os;
    os << "bump:" << center << ":" << width;
    t.name = os.str();
    return t;
}

inline TestFn gaussian_fn(double center, double width) {
    if (!(width > 0.0)) throw PreconditionError("gaussian_fn: need width > 0");
    TestFn t;
    t.f = [center, width](double x) {
        const double u = (x - center) / width;
        return std::exp(-0.5 * u * u);
    };
    std::ostringstream os;
    os << "gaussian:" << center << ":" << width;
    t.name = os.str();
    return t;
}

// Piecewise-linear tent: 1 at the center, 0 beyond center +- width.
inline TestFn hat_fn(double center, double width) {
    if (!(width > 0.0)) throw PreconditionError("hat_fn: need width > 0");
    TestFn t;
    t.f = [center, width](double x) {
        return std::max(0.0, 1.0 - std::abs(x - center) / width);
    };
    t.breakpoints = {center - width, center, center + width};
    std::ostringstream os;
    os << "hat:" << center << ":" << width;
    t.name = os.str();
    return t;
}

inline TestFn cosine_fn(double freq) {
    TestFn t;
    t.f = [freq](double x) { return std::cos(freq * x); };
    std::ostringstream os;
    os << "cosine:" << freq;
    t.name = os.str();
    return t;
}

// Parses "indicator:lo:hi", "bump:c:w", "gaussian:c:w", "cosine:freq".
inline TestFn make_test_fn(const std::string& spec) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : spec) {
        if (c == ':') { parts.push_back(cur); cur.clear(); }
        else cur.push_back(c);
    }
    parts.push_back(cur);
    auto num = [&](std::size_t i) -> double {
        try {
            return std::stod(parts.at(i));
        } catch (const std::exception&) {
            throw PreconditionError("make_test_fn: bad number in '" + spec + "'");
        }
    };
    if (parts[0] == "indicator" && parts.size() == 3) return indicator_fn(num(1), num(2));
    if (parts[0] == "bump" && parts.size() == 3) return bump_fn(num(1), num(2));
    if (parts[0] == "gaussian" && parts.size() == 3) return gaussian_fn(num(1), num(2));
    if (parts[0] == "hat" && parts.size() == 3) return hat_fn(num(1), num(2));
    if (parts[0] == "cosine" && parts.size() == 2) return cosine_fn(num(1));
    throw PreconditionError("make_test_fn: unknown test function '" + spec + "'");
}

// --- additive statistics -----------------------------------------------------

// S_f(X) = sum over points of f(x).
inline double additive(const TestFn& f, const Configuration& config) {
    double s = 0.0;
    for (double x : config.points) s += f(x);
    return s;
}

struct QuadratureDiagnostic {
    double coarse = 0.0;
    double fine = 0.0;
    bool converged = true;  // |fine - coarse| <= 1e-6 * (1 + |fine|)
};

// E S_f = int f(x) rho(x) dx over the kernel window, split at the breakpoints
// of f. Evaluated at two node counts; a mismatch beyond 1e-6 is flagged in
// the diagnostic (and the finer value is returned either way).
template <PointKernel K>
double expected_additive(const TestFn& f, const K& kernel, int n_per_piece = 48,
                         QuadratureDiagnostic* diag = nullptr) {
    const Window w = kernel.window();
    auto integrand = [&](double x) { return f(x) * kernel.intensity(x); };
    const double max_len = std::min(4.0, w.length());
    const double coarse =
        integrate_piecewise(integrand, w.lo, w.hi, f.breakpoints, n_per_piece, max_len);
    const double fine =
        integrate_piecewise(integrand, w.lo, w.hi, f.breakpoints, 2 * n_per_piece, max_len);
    if (diag) {
        diag->coarse = coarse;
        diag->fine = fine;
        diag->converged = std::abs(fine - coarse) <= 1e-6 * (1.0 + std::abs(fine));
    }
    return fine;
}

// Centered statistic S_f(X) - E S_f. Hot loops should compute the expectation
// once and subtract it themselves.
template <PointKernel K>
double normalized_additive(const TestFn& f, const K& kernel, const Configuration& config,
                           int n_per_piece = 48) {
    return additive(f, config) - expected_additive(f, kernel, n_per_piece);
}

// Squared variance seminorm  (1/2) iint |f(x)-f(y)|^2 K(x,y)^2 dx dy  over
// the window square. Equals Var S_f for projection kernels supported in the
// window; for kernels leaking mass outside it is the window-truncated value.
template <PointKernel K>
double variance_norm_sq(const TestFn& f, const K& kernel, int n_per_piece = 32) {
    const Window w = kernel.window();
    auto integrand = [&](double x, double y) {
        const double d = f(x) - f(y);
        const double k = kernel.eval(x, y);
        return 0.5 * d * d * k * k;
    };
    const double max_len = std::min(3.0, w.length());
    return integrate2d_piecewise(integrand, w.lo, w.hi, f.breakpoints, n_per_piece, max_len);
}

// Exact variance of the additive statistic under the determinantal law with
// this kernel:  Var S_f = int f^2 rho - iint f(x) f(y) K(x,y)^2. Holds for any
// symmetric kernel with eigenvalues in [0,1], projection or not, so it is the
// right oracle for samples drawn from a window-restricted kernel.
template <PointKernel K>
double variance_of_additive(const TestFn& f, const K& kernel, int n_1d = 48, int n_2d = 32) {
    const Window w = kernel.window();
    const double max_len = std::min(3.0, w.length());
    auto one = [&](double x) {
        const double v = f(x);
        return v * v * kernel.intensity(x);
    };
    const double first = integrate_piecewise(one, w.lo, w.hi, f.breakpoints, n_1d, max_len);
    auto two = [&](double x, double y) {
        const double k = kernel.eval(x, y);
        return f(x) * f(y) * k * k;
    };
    const double second = integrate2d_piecewise(two, w.lo, w.hi, f.breakpoints, n_2d, max_len);
    return first - second;
}

// --- regularized Coulomb sums ------------------------------------------------

// Cutoff data for the two-sided regularization: points are kept only when
// |x| < R and |x - a| > delta (both strict). The optional second anchor b is
// used by the pair statistic and the change-of-measure factor.
struct CutoffSpec {
    double R;
    double delta;
    double a;
    std::optional<double> b;

    CutoffSpec(double R_, double delta_, double a_, std::optional<double> b_ = std::nullopt)
        : R(R_), delta(delta_), a(a_), b(b_) {
        if (!(delta > 0.0 && delta < 1.0))
            throw PreconditionError("CutoffSpec: need 0 < delta < 1");
        if (!(R > std::abs(a) + 1.0))
            throw PreconditionError("CutoffSpec: need R > |a| + 1");
        if (b && !(std::abs(*b - a) < 1.0))
            throw PreconditionError("CutoffSpec: need |b - a| < 1");
    }

    bool keeps(double x) const { return std::abs(x) < R && std::abs(x - a) > delta; }
    bool keeps_pair(double x) const {
        return keeps(x) && (!b || std::abs(x - *b) > delta);
    }
};

// The cutoff Coulomb summand as a test function, for quadrature oracles.
inline TestFn coulomb_test_fn(const CutoffSpec& spec) {
    TestFn t;
    t.f = [spec](double x) { return spec.keeps(x) ? 2.0 / (spec.a - x) : 0.0; };
    t.breakpoints = {-spec.R, spec.R, spec.a - spec.delta, spec.a + spec.delta};
    t.name = "coulomb";
    return t;
}

// S^{R,delta}_a(X) = sum over kept points of 2/(a - x).
inline double regularized_coulomb(const CutoffSpec& spec, const Configuration& config) {
    double s = 0.0;
    for (double x : config.points)
        if (spec.keeps(x)) s += 2.0 / (spec.a - x);
    return s;
}

// Pair variant: the summand is centered at b but points near both anchors are
// excised. With b absent (or b == a) this reduces to the single-anchor sum.
inline double regularized_coulomb_pair(const CutoffSpec& spec, const Configuration& config) {
    const double b = spec.b.value_or(spec.a);
    double s = 0.0;
    for (double x : config.points)
        if (spec.keeps_pair(x)) s += 2.0 / (b - x);
    return s;
}

// E^a S^{R,delta}_a under the reduced kernel at anchor a: quadrature of
// f^{R,delta}_a(x) K^a(x,x) with the domain split at the cutoff radii. The
// integrand is regular at a because K^a(x,x) vanishes to second order there.
// Pieces hugging the excised collar get extra nodes once delta is small
// relative to the window scale.
template <PointKernel K>
double expected_regularized_coulomb(const K& reduced, const CutoffSpec& spec,
                                    int n_per_piece = 48) {
    const Window w = reduced.window();
    const std::vector<double> breaks = {-spec.R, spec.R, spec.a - spec.delta,
                                        spec.a + spec.delta};
    const std::vector<double> t =
        refine_partition(make_partition(w.lo, w.hi, breaks), std::min(4.0, w.length()));
    double s = 0.0;
    for (std::size_t p = 0; p + 1 < t.size(); ++p) {
        const double mid = 0.5 * (t[p] + t[p + 1]);
        if (!spec.keeps(mid)) continue;
        const bool near_collar = std::min(std::abs(t[p] - spec.a), std::abs(t[p + 1] - spec.a)) <
                                 2.0 * spec.delta + 1e-12;
        const int n = near_collar ? std::max(2 * n_per_piece, 96) : n_per_piece;
        auto integrand = [&](double x) {
            return 2.0 / (spec.a - x) * reduced.intensity(x);
        };
        s += integrate(integrand, gauss_legendre(n, t[p], t[p + 1]));
    }
    return s;
}

// Centered Coulomb statistic under the reduced measure at a.
template <PointKernel K>
double normalized_coulomb(const K& reduced, const CutoffSpec& spec,
                          const Configuration& config, int n_per_piece = 48) {
    return regularized_coulomb(spec, config) -
           expected_regularized_coulomb(reduced, spec, n_per_piece);
}

// --- multiplicative statistics -----------------------------------------------

// Psi_g(X) = prod over points of g(x); empty product is 1, and a zero factor
// makes the product exactly 0.
inline double multiplicative(const std::function<double(double)>& g,
                             const Configuration& config) {
    double p = 1.0;
    for (double x : config.points) {
        const double v = g(x);
        if (v == 0.0) return 0.0;
        p *= v;
    }
    return p;
}

// exp(S_{log g}(X) - E S_{log g}), the expectation-centered product. Requires
// g > 0 at every point of X and log g integrable against the intensity.
inline double tilde_multiplicative(const TestFn& g, const Configuration& config,
                                   double expected_log) {
    double s = 0.0;
    for (double x : config.points) {
        const double v = g(x);
        if (!(v > 0.0))
            throw DomainError("tilde_multiplicative: g must be positive on the configuration");
        s += std::log(v);
    }
    return std::exp(s - expected_log);
}

template <PointKernel K>
double expected_log_multiplicative(const TestFn& g, const K& kernel, int n_per_piece = 48) {
    TestFn lg;
    lg.f = [&g](double x) { return std::log(g(x)); };
    lg.breakpoints = g.breakpoints;
    const double v = expected_additive(lg, kernel, n_per_piece);
    if (!std::isfinite(v))
        throw DomainError("expected_log_multiplicative: log g not integrable against intensity");
    return v;
}

template <PointKernel K>
double tilde_multiplicative(const TestFn& g, const K& kernel, const Configuration& config,
                            int n_per_piece = 48) {
    return tilde_multiplicative(g, config,
                                expected_log_multiplicative(g, kernel, n_per_piece));
}

// Monte Carlo normalized product: the centered products are averaged over the
// supplied samples and each sample is divided by that mean, so the in-sample
// mean of the normalized values is exactly 1.
struct NormalizedMultiplicative {
    Estimate normalizer;   // mean of tilde products over the samples
    double expected_log;   // caches the quadrature centering
    std::vector<double> values;  // normalized per-sample values
};

template <PointKernel K>
NormalizedMultiplicative normalized_multiplicative(const TestFn& g, const K& kernel,
                                                   const std::vector<Configuration>& samples,
                                                   int n_per_piece = 48) {
    if (samples.empty())
        throw PreconditionError("normalized_multiplicative: need at least one sample");
    const double elog = expected_log_multiplicative(g, kernel, n_per_piece);
    RunningStat stat;
    std::vector<double> raw;
    raw.reserve(samples.size());
    for (const auto& X : samples) {
        const double v = tilde_multiplicative(g, X, elog);
        raw.push_back(v);
        stat.add(v);
    }
    const Estimate z = stat.mean_estimate();
    if (!(z.value > 0.0) || z.rel_stderr() > defaults::normalizer_rel_stderr)
        throw DegenerateError("normalized_multiplicative: normalizer too noisy");
    NormalizedMultiplicative out;
    out.normalizer = z;
    out.expected_log = elog;
    out.values.reserve(raw.size());
    for (double v : raw) out.values.push_back(v / z.value);
    return out;
}

// --- distance between multiplicative perturbations ---------------------------

// Parameters of the perturbation class: g is pinned to [eps_floor, M] outside
// the core interval B1 and may dip toward 0 only inside it; B2 is the larger
// interval where the fractional moment is used.
struct GSpaceParams {
    double alpha = defaults::alpha;  // fractional exponent is 1 + alpha
    double eps_floor;
    double bound;  // M
    Window core;   // B1
    Window bulk;   // B2, must contain B1

    GSpaceParams(double alpha_, double eps_floor_, double bound_, Window core_, Window bulk_)
        : alpha(alpha_), eps_floor(eps_floor_), bound(bound_), core(core_), bulk(bulk_) {
        if (!(alpha > 0.0 && alpha < 1.0))
            throw PreconditionError("GSpaceParams: need 0 < alpha < 1");
        if (!(eps_floor > 0.0 && bound > eps_floor))
            throw PreconditionError("GSpaceParams: need 0 < eps_floor < bound");
        if (!(bulk.lo <= core.lo && core.hi <= bulk.hi))
            throw PreconditionError("GSpaceParams: bulk interval must contain the core");
    }
};

// Largest eigenvalue of the kernel restricted to the bulk interval. The
// distance is only a metric while this stays strictly below 1.
template <PointKernel K>
double restricted_operator_norm(const K& kernel, const Window& span, int n_nodes = 96) {
    const QuadratureRule rule = gauss_legendre(n_nodes, span.lo, span.hi);
    Eigen::MatrixXd m(n_nodes, n_nodes);
    for (int i = 0; i < n_nodes; ++i) {
        for (int j = 0; j <= i; ++j) {
            const double v = std::sqrt(rule.weights[i] * rule.weights[j]) *
                             kernel.eval(rule.nodes[i], rule.nodes[j]);
            m(i, j) = v;
            m(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

// d(g1, g2) = int_{B2} |g1-g2|^{1+alpha} rho + int_{W \ B2} |g1-g2|^2 rho.
// Demands the restricted operator norm condition before evaluating.
template <PointKernel K>
double g_distance(const TestFn& g1, const TestFn& g2, const GSpaceParams& params,
                  const K& kernel, int n_per_piece = 48) {
    const Window w = kernel.window();
    if (!(params.bulk.lo >= w.lo && params.bulk.hi <= w.hi))
        throw PreconditionError("g_distance: bulk interval must sit inside the window");
    const double norm = restricted_operator_norm(kernel, params.bulk);
    if (!(norm < 1.0 - 1e-9))
        throw PreconditionError("g_distance: restricted operator norm must stay below 1");
    std::vector<double> breaks = g1.breakpoints;
    breaks.insert(breaks.end(), g2.breakpoints.begin(), g2.breakpoints.end());
    breaks.push_back(params.bulk.lo);
    breaks.push_back(params.bulk.hi);
    const double p = 1.0 + params.alpha;
    auto integrand = [&](double x) {
        const double d = std::abs(g1(x) - g2(x));
        const double rho = kernel.intensity(x);
        const bool in_bulk = x >= params.bulk.lo && x <= params.bulk.hi;
        return (in_bulk ? std::pow(d, p) : d * d) * rho;
    };
    return integrate_piecewise(integrand, w.lo, w.hi, breaks, n_per_piece,
                               std::min(4.0, w.length()));
}

}  // namespace dpp
