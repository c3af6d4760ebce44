#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "dpp/configuration.hpp"
#include "dpp/discretize.hpp"
#include "dpp/estimate.hpp"
#include "dpp/palm.hpp"
#include "dpp/rng.hpp"

namespace dpp {

namespace detail {

// Sequential sampler for a projection process K = R R^T on node indices.
// Row norms of R are the current conditional intensities; after a draw the
// row-space direction of the drawn node is projected out, which is exactly
// the Palm/Schur-complement update. R is consumed.
inline std::vector<int> sample_projection_nodes(Eigen::MatrixXd R, int steps, Rng& rng) {
    const int n = static_cast<int>(R.rows());
    Eigen::VectorXd d = R.rowwise().squaredNorm();
    std::vector<int> out;
    out.reserve(steps);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int s = 0; s < steps; ++s) {
        double total = 0.0;
        for (int i = 0; i < n; ++i) total += std::max(d[i], 0.0);
        if (!(total > 0.0))
            throw NumericalError("projection sampler: conditional intensity exhausted");
        const double target = unif(rng) * total;
        int idx = n - 1;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            acc += std::max(d[i], 0.0);
            if (acc >= target) { idx = i; break; }
        }
        out.push_back(idx);
        Eigen::VectorXd u = R.row(idx).transpose();
        const double norm = u.norm();
        if (!(norm > 0.0))
            throw NumericalError("projection sampler: degenerate row selected");
        u /= norm;
        const Eigen::VectorXd z = R * u;
        R.noalias() -= z * u.transpose();
        for (int i = 0; i < n; ++i) d[i] = std::max(d[i] - z[i] * z[i], 0.0);
        d[idx] = 0.0;
    }
    return out;
}

inline Configuration jitter_nodes(const DiscretizedKernel& disc, const std::vector<int>& idx,
                                  Rng& rng) {
    std::vector<double> pts;
    pts.reserve(idx.size());
    for (int i : idx) {
        std::uniform_real_distribution<double> cell(disc.cell_lo[i], disc.cell_hi[i]);
        pts.push_back(cell(rng));
    }
    return Configuration::from_points(std::move(pts));
}

} // namespace detail

// Spectral sampler: Bernoulli(lambda_k) selects eigenfunctions, then one
// point per selected eigenfunction is drawn sequentially from the running
// projection density; node draws are jittered uniformly inside the local
// quadrature cell to report continuous positions.
inline Configuration sample_dpp(const DiscretizedKernel& disc, Rng& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> sel;
    for (int j = 0; j < disc.rank; ++j)
        if (unif(rng) < disc.eigenvalues[j]) sel.push_back(j);
    if (sel.empty()) return {};
    Eigen::MatrixXd R(disc.n(), static_cast<int>(sel.size()));
    for (std::size_t j = 0; j < sel.size(); ++j) R.col(j) = disc.eigenvectors.col(sel[j]);
    const auto idx = detail::sample_projection_nodes(std::move(R),
                                                     static_cast<int>(sel.size()), rng);
    return detail::jitter_nodes(disc, idx, rng);
}

// Composition of palm_reduce and sample_dpp for arbitrary anchor lists.
inline Configuration sample_palm(const PalmKernel& pk, int n_nodes, Rng& rng) {
    const DiscretizedKernel d = discretize(pk, n_nodes);
    return sample_dpp(d, rng);
}

// Single-anchor Palm sampling without a per-anchor n x n eigensolve: the
// anchor column is projected onto the retained eigenbasis (components on
// dropped eigenvectors are O(rank_floor)) and the rank-one downdate
// diag(lambda) - u u^T is eigensolved in that r-dimensional space.
class PalmSampler {
public:
    PalmSampler(KernelModel kernel, const DiscretizedKernel& disc)
        : kernel_(std::move(kernel)), disc_(&disc) {}

    // Per-anchor sampling basis: Bernoulli weights and node-space eigenvectors
    // of the downdated kernel, reusable across many draws at the same anchor.
    struct Basis {
        Eigen::VectorXd mu;     // descending, clipped to [0,1]
        Eigen::MatrixXd modes;  // n x r node-space eigenvectors
    };

    // Eigenvalues of the discretized Palm kernel (descending, clipped).
    Eigen::VectorXd palm_spectrum(double anchor) const { return prepare(anchor).mu; }

    Basis prepare(double anchor) const {
        const double c = kernel_.intensity(anchor);
        if (!(c > defaults::intensity_floor)) {
            // Degenerate anchor: conditioning is a no-op, use the base kernel.
            Basis b;
            b.mu = disc_->top_eigenvalues();
            b.modes = disc_->top_basis();
            return b;
        }
        const int n = disc_->n(), r = disc_->rank;
        Eigen::VectorXd k(n);
        for (int i = 0; i < n; ++i)
            k[i] = disc_->sqrt_w[i] * kernel_.eval(disc_->nodes[i], anchor);
        const Eigen::VectorXd u = disc_->top_basis().transpose() * k / std::sqrt(c);
        Eigen::MatrixXd S = Eigen::MatrixXd(disc_->top_eigenvalues().asDiagonal());
        S.noalias() -= u * u.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        if (es.info() != Eigen::Success)
            throw NumericalError("palm sampler: downdate eigensolve failed");
        Basis b;
        b.mu = es.eigenvalues().reverse();
        Eigen::MatrixXd vecs(r, r);
        for (int j = 0; j < r; ++j) vecs.col(j) = es.eigenvectors().col(r - 1 - j);
        if (b.mu[0] > 1.0 + defaults::eigenvalue_excursion ||
            b.mu[r - 1] < -defaults::eigenvalue_excursion)
            throw NumericalError("palm sampler: eigenvalue excursion in downdate");
        for (int j = 0; j < r; ++j) b.mu[j] = std::min(1.0, std::max(0.0, b.mu[j]));
        b.modes = disc_->top_basis() * vecs;
        return b;
    }

    Configuration sample_with(const Basis& basis, Rng& rng) const {
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        std::vector<int> sel;
        for (int j = 0; j < basis.mu.size(); ++j)
            if (basis.mu[j] > defaults::rank_floor && unif(rng) < basis.mu[j])
                sel.push_back(j);
        if (sel.empty()) return {};
        Eigen::MatrixXd R(basis.modes.rows(), static_cast<int>(sel.size()));
        for (std::size_t j = 0; j < sel.size(); ++j) R.col(j) = basis.modes.col(sel[j]);
        const auto idx = detail::sample_projection_nodes(std::move(R),
                                                         static_cast<int>(sel.size()), rng);
        return detail::jitter_nodes(*disc_, idx, rng);
    }

    Configuration sample(double anchor, Rng& rng) const {
        return sample_with(prepare(anchor), rng);
    }

    std::vector<Configuration> sample_many(double anchor, std::int64_t count, Rng& rng) const {
        const Basis basis = prepare(anchor);
        std::vector<Configuration> out;
        out.reserve(count);
        for (std::int64_t s = 0; s < count; ++s) out.push_back(sample_with(basis, rng));
        return out;
    }

private:
    KernelModel kernel_;
    const DiscretizedKernel* disc_;
};

// Weight function with bounded support, zero outside [lo, hi].
struct SupportedFn {
    std::function<double(double)> f;
    double lo = 0.0;
    double hi = 0.0;

    double operator()(double x) const { return (x < lo || x > hi) ? 0.0 : f(x); }
};

// Inverse-CDF sampler for a density proportional to chi(a) rho_1(a). The
// density is tabulated on a fine grid and sampled exactly from its trapezoid
// interpolant; normalizer() is the interpolant's mass, the weight that makes
// integrals against the (unnormalized) Campbell measure unbiased.
class AnchorDistribution {
public:
    template <PointKernel K>
    AnchorDistribution(const K& kernel, const SupportedFn& chi, int grid = 4096) {
        const Window w = kernel.window();
        lo_ = std::max(w.lo, chi.lo);
        hi_ = std::min(w.hi, chi.hi);
        if (!(lo_ < hi_))
            throw PreconditionError("anchor sampler: support does not meet the window");
        grid = std::max(grid, 16);
        h_ = (hi_ - lo_) / grid;
        dens_.resize(grid + 1);
        for (int i = 0; i <= grid; ++i) {
            const double x = lo_ + i * h_;
            const double v = chi(x) * kernel.intensity(x);
            if (!(v >= 0.0))
                throw PreconditionError("anchor sampler: chi * rho must be nonnegative");
            dens_[i] = v;
        }
        cum_.assign(grid + 1, 0.0);
        for (int i = 0; i < grid; ++i)
            cum_[i + 1] = cum_[i] + 0.5 * (dens_[i] + dens_[i + 1]) * h_;
        if (!(cum_.back() > 0.0))
            throw PreconditionError("anchor sampler: support has zero intensity mass");
    }

    double normalizer() const { return cum_.back(); }

    double sample(Rng& rng) const {
        std::uniform_real_distribution<double> unif(0.0, cum_.back());
        const double target = unif(rng);
        auto it = std::upper_bound(cum_.begin(), cum_.end(), target);
        std::size_t cell = (it == cum_.begin()) ? 0 : (it - cum_.begin() - 1);
        if (cell >= dens_.size() - 1) cell = dens_.size() - 2;
        const double rest = target - cum_[cell];
        const double g0 = dens_[cell], g1 = dens_[cell + 1];
        const double slope = g1 - g0;
        double s;
        if (std::abs(slope) < 1e-14 * (g0 + g1 + 1e-300)) {
            s = g0 > 0.0 ? rest / (g0 * h_) : 0.5;
        } else {
            const double disc = g0 * g0 + 2.0 * slope * rest / h_;
            s = (std::sqrt(std::max(disc, 0.0)) - g0) / slope;
        }
        s = std::min(1.0, std::max(0.0, s));
        return lo_ + (cell + s) * h_;
    }

private:
    double lo_ = 0.0, hi_ = 0.0, h_ = 0.0;
    std::vector<double> dens_;
    std::vector<double> cum_;
};

// Reduced Campbell sampler: anchor with density proportional to
// chi(a) rho_1(a), configuration from the Palm measure at that anchor.
class CampbellSampler {
public:
    CampbellSampler(const KernelModel& kernel, const DiscretizedKernel& disc,
                    const SupportedFn& chi)
        : anchor_(kernel, chi), palm_(kernel, disc) {}

    double normalizer() const { return anchor_.normalizer(); }

    CampbellSample sample(Rng& rng) const {
        CampbellSample out;
        out.anchor = anchor_.sample(rng);
        out.config = palm_.sample(out.anchor, rng);
        return out;
    }

private:
    AnchorDistribution anchor_;
    PalmSampler palm_;
};

inline CampbellSample sample_campbell(const KernelModel& kernel, const DiscretizedKernel& disc,
                                      const SupportedFn& chi, Rng& rng) {
    return CampbellSampler(kernel, disc, chi).sample(rng);
}

// Binned one-point intensity from sampled configurations.
struct IntensityProfile {
    std::vector<double> edges;       // n_bins + 1
    std::vector<Estimate> intensity; // per bin, count / bin width
};

inline IntensityProfile empirical_intensity(const std::vector<Configuration>& samples,
                                            const Window& w, int n_bins) {
    if (samples.empty())
        throw PreconditionError("empirical_intensity: needs at least one sample");
    if (n_bins < 1) throw PreconditionError("empirical_intensity: needs at least one bin");
    IntensityProfile prof;
    prof.edges.resize(n_bins + 1);
    const double h = w.length() / n_bins;
    for (int b = 0; b <= n_bins; ++b) prof.edges[b] = w.lo + b * h;
    std::vector<RunningStat> stats(n_bins);
    for (const auto& cfg : samples) {
        std::vector<int> counts(n_bins, 0);
        for (double x : cfg.points) {
            int b = static_cast<int>((x - w.lo) / h);
            if (b < 0 || b >= n_bins) continue;
            ++counts[b];
        }
        for (int b = 0; b < n_bins; ++b) stats[b].add(counts[b] / h);
    }
    prof.intensity.reserve(n_bins);
    for (int b = 0; b < n_bins; ++b) prof.intensity.push_back(stats[b].mean_estimate());
    return prof;
}

} // namespace dpp
