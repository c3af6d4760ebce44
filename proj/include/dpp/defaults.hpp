#pragma once

// Central numerical knobs. Every tolerance that appears in an interface
// contract lives here so tests and library agree on one value.

namespace dpp::defaults {

// |x - y| below which eval_kernel switches to the Taylor (diagonal) branch.
inline constexpr double diag_switch_threshold = 1e-6;

// First intensity at or below this is treated as zero (degenerate anchor).
inline constexpr double intensity_floor = 1e-12;

// Nodes for Gauss-Legendre discretization of a kernel on its window.
inline constexpr int n_nodes = 200;

// Discretized eigenvalues are clipped to [0,1]; excursions beyond this are a
// hard failure.
inline constexpr double eigenvalue_excursion = 1e-6;

// Eigenvalues below this are dropped from the retained spectral basis; the
// corresponding selection probabilities are numerically zero.
inline constexpr double rank_floor = 1e-14;

// G-space exponent and Palm-pair distance bound.
inline constexpr double alpha = 0.5;
inline constexpr double vartheta = 0.25;

// Cauchy gap below which a regularization schedule counts as converged.
inline constexpr double conv_tol = 1e-2;

// Minimal particle gap before a diffusion step is rejected.
inline constexpr double collision_floor = 1e-5;

// Relative standard error above which an estimated normalizer is degenerate.
inline constexpr double normalizer_rel_stderr = 0.20;

// Step size for central finite differences on user-supplied intensities.
inline constexpr double fd_step = 1e-5;

} // namespace dpp::defaults
