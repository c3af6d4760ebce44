#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "dpp/defaults.hpp"
#include "dpp/errors.hpp"
#include "dpp/kernel.hpp"
#include "dpp/quadrature.hpp"

namespace dpp {

// Nystrom discretization of a kernel on its window: Gauss-Legendre nodes,
// weight-symmetrized matrix K_ij = sqrt(w_i) Pi(x_i,x_j) sqrt(w_j), and its
// spectral decomposition. Eigenvalues are stored descending and clipped to
// [0,1]; an excursion beyond the tolerance is a hard failure because it means
// the quadrature stopped resolving the kernel.
struct DiscretizedKernel {
    Window window;
    Eigen::VectorXd nodes;       // ascending
    Eigen::VectorXd weights;
    Eigen::VectorXd sqrt_w;
    Eigen::VectorXd cell_lo;     // jitter cell of each node (midpoint partition)
    Eigen::VectorXd cell_hi;
    Eigen::MatrixXd matrix;
    Eigen::VectorXd eigenvalues;     // descending, clipped to [0,1]
    Eigen::VectorXd eigenvalues_raw; // descending, before clipping
    Eigen::MatrixXd eigenvectors;
    double trace = 0.0;
    double eig_min_raw = 0.0;    // before clipping
    double eig_max_raw = 0.0;
    int rank = 0;                // eigenvalues above the rank floor

    int n() const { return static_cast<int>(nodes.size()); }
    auto top_basis() const { return eigenvectors.leftCols(rank); }
    auto top_eigenvalues() const { return eigenvalues.head(rank); }
};

// A quadrature panel: [lo, hi] with its own node count. Panels let the node
// density vary across the window, e.g. to resolve a small collar around an
// anchor without paying for fine nodes everywhere.
struct Panel {
    double lo;
    double hi;
    int n;
};

namespace detail {

template <PointKernel K>
DiscretizedKernel discretize_rule(const K& kernel, const QuadratureRule& rule,
                                  bool enforce_excursion) {
    const Window w = kernel.window();
    DiscretizedKernel d;
    d.window = w;

    const int n = static_cast<int>(rule.nodes.size());
    d.nodes = Eigen::Map<const Eigen::VectorXd>(rule.nodes.data(), n);
    d.weights = Eigen::Map<const Eigen::VectorXd>(rule.weights.data(), n);
    d.sqrt_w = d.weights.cwiseSqrt();

    d.cell_lo.resize(n);
    d.cell_hi.resize(n);
    for (int i = 0; i < n; ++i) {
        d.cell_lo[i] = (i == 0) ? w.lo : 0.5 * (d.nodes[i - 1] + d.nodes[i]);
        d.cell_hi[i] = (i == n - 1) ? w.hi : 0.5 * (d.nodes[i] + d.nodes[i + 1]);
    }

    d.matrix.resize(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = d.sqrt_w[i] * kernel.eval(d.nodes[i], d.nodes[j]) * d.sqrt_w[j];
            d.matrix(i, j) = v;
            d.matrix(j, i) = v;
        }
    }
    d.trace = d.matrix.trace();
    if (!d.matrix.allFinite()) throw NumericalError("discretize: non-finite kernel matrix");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d.matrix);
    if (es.info() != Eigen::Success) throw NumericalError("discretize: eigensolver failed");

    // Eigen returns ascending order; flip to descending.
    const int cols = n;
    d.eigenvalues_raw = es.eigenvalues().reverse();
    d.eigenvalues = d.eigenvalues_raw;
    d.eigenvectors.resize(n, cols);
    for (int j = 0; j < cols; ++j) d.eigenvectors.col(j) = es.eigenvectors().col(cols - 1 - j);

    d.eig_min_raw = d.eigenvalues[cols - 1];
    d.eig_max_raw = d.eigenvalues[0];
    if (enforce_excursion &&
        (d.eig_max_raw > 1.0 + defaults::eigenvalue_excursion ||
         d.eig_min_raw < -defaults::eigenvalue_excursion))
        throw NumericalError("discretize: eigenvalue excursion beyond tolerance; "
                             "increase n_nodes");

    for (int j = 0; j < cols; ++j)
        d.eigenvalues[j] = std::min(1.0, std::max(0.0, d.eigenvalues[j]));
    d.rank = 0;
    while (d.rank < cols && d.eigenvalues[d.rank] > defaults::rank_floor) ++d.rank;
    return d;
}

template <PointKernel K>
DiscretizedKernel discretize_impl(const K& kernel, int n_nodes, bool enforce_excursion) {
    if (n_nodes < 16) throw PreconditionError("discretize: n_nodes must be >= 16");
    const Window w = kernel.window();
    return discretize_rule(kernel, gauss_legendre(n_nodes, w.lo, w.hi), enforce_excursion);
}

} // namespace detail

template <PointKernel K>
DiscretizedKernel discretize(const K& kernel, int n_nodes = defaults::n_nodes) {
    return detail::discretize_impl(kernel, n_nodes, true);
}

// Panel variant: the panels must tile the kernel window exactly in ascending
// order. Nodes are Gauss-Legendre within each panel.
template <PointKernel K>
DiscretizedKernel discretize(const K& kernel, const std::vector<Panel>& panels) {
    if (panels.empty()) throw PreconditionError("discretize: need at least one panel");
    const Window w = kernel.window();
    const double scale = std::max(1.0, w.length());
    if (std::abs(panels.front().lo - w.lo) > 1e-12 * scale ||
        std::abs(panels.back().hi - w.hi) > 1e-12 * scale)
        throw PreconditionError("discretize: panels must cover the window");
    QuadratureRule rule;
    int total = 0;
    for (std::size_t p = 0; p < panels.size(); ++p) {
        if (!(panels[p].lo < panels[p].hi))
            throw PreconditionError("discretize: panel bounds out of order");
        if (p > 0 && std::abs(panels[p].lo - panels[p - 1].hi) > 1e-12 * scale)
            throw PreconditionError("discretize: panels must be contiguous");
        if (panels[p].n < 4)
            throw PreconditionError("discretize: each panel needs at least 4 nodes");
        const QuadratureRule piece = gauss_legendre(panels[p].n, panels[p].lo, panels[p].hi);
        rule.nodes.insert(rule.nodes.end(), piece.nodes.begin(), piece.nodes.end());
        rule.weights.insert(rule.weights.end(), piece.weights.begin(), piece.weights.end());
        total += panels[p].n;
    }
    if (total < 16) throw PreconditionError("discretize: need at least 16 nodes in total");
    return detail::discretize_rule(kernel, rule, true);
}

// Diagnostic report for the standing kernel assumptions: symmetry, spectrum
// of the discretized operator in [0, 1+tol], smoothness (bounded second
// differences), and integrability of Pi(x,x)/(1+x^2) over the window.
// Failures are reported, not thrown. The division property of the underlying
// function space is structural and has no numerical check here.
struct AssumptionReport {
    bool symmetric_ok = false;
    double symmetry_residual = 0.0;
    bool spectrum_ok = false;
    double projection_residual = 0.0; // max |lambda^2 - lambda| = ||K^2 - K||_2
    double eig_min = 0.0;
    double eig_max = 0.0;
    bool smooth_ok = false;
    double second_difference_max = 0.0;
    bool integrable_ok = false;
    double intensity_integral = 0.0;

    bool ok() const { return symmetric_ok && spectrum_ok && smooth_ok && integrable_ok; }
};

template <PointKernel K>
AssumptionReport check_assumption2(const K& kernel, int grid_size = 64,
                                   double tol = defaults::eigenvalue_excursion) {
    if (grid_size < 16) throw PreconditionError("check_assumption2: grid_size must be >= 16");
    const Window w = kernel.window();
    AssumptionReport rep;

    // Cell-midpoint grid keeps evaluations strictly inside the window.
    const int g = std::min(grid_size, 96);
    const double h = w.length() / g;
    std::vector<double> grid(g);
    for (int i = 0; i < g; ++i) grid[i] = w.lo + (i + 0.5) * h;

    double sym = 0.0;
    for (int i = 0; i < g; ++i)
        for (int j = i + 1; j < g; ++j)
            sym = std::max(sym, std::abs(kernel.eval(grid[i], grid[j]) -
                                         kernel.eval(grid[j], grid[i])));
    rep.symmetry_residual = sym;
    rep.symmetric_ok = std::isfinite(sym) && sym <= 1e-12;

    try {
        const DiscretizedKernel d = detail::discretize_impl(kernel, std::max(grid_size, 16), false);
        rep.eig_min = d.eig_min_raw;
        rep.eig_max = d.eig_max_raw;
        double resid = 0.0;
        for (int i = 0; i < d.eigenvalues_raw.size(); ++i) {
            const double ev = d.eigenvalues_raw[i];
            resid = std::max(resid, std::abs(ev * ev - ev));
        }
        rep.projection_residual = resid;
        rep.spectrum_ok = rep.eig_min >= -tol && rep.eig_max <= 1.0 + tol;
    } catch (const std::exception&) {
        rep.spectrum_ok = false;
    }

    double d2max = 0.0;
    const double yc = grid[g / 2];
    for (int i = 1; i + 1 < g; ++i) {
        const double d2diag = (kernel.intensity(grid[i + 1]) - 2.0 * kernel.intensity(grid[i])
                             + kernel.intensity(grid[i - 1])) / (h * h);
        const double d2row = (kernel.eval(grid[i + 1], yc) - 2.0 * kernel.eval(grid[i], yc)
                            + kernel.eval(grid[i - 1], yc)) / (h * h);
        d2max = std::max({d2max, std::abs(d2diag), std::abs(d2row)});
    }
    rep.second_difference_max = d2max;
    rep.smooth_ok = std::isfinite(d2max);

    rep.intensity_integral = integrate_piecewise(
        [&](double x) { return kernel.intensity(x) / (1.0 + x * x); },
        w.lo, w.hi, {}, 96);
    rep.integrable_ok = std::isfinite(rep.intensity_integral);
    return rep;
}

} // namespace dpp
