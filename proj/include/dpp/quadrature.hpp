#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dpp/errors.hpp"
#include "dpp/window.hpp"

namespace dpp {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    std::size_t size() const { return nodes.size(); }
};

// Gauss-Legendre rule on [-1,1], nodes by Newton iteration on the Legendre
// recurrence. Accurate to ~1e-15 for the n used here (hundreds).
inline QuadratureRule gauss_legendre(int n) {
    if (n < 1) throw PreconditionError("gauss_legendre: n must be >= 1");
    QuadratureRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double dz = p1 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        rule.nodes[i] = -z;
        rule.nodes[n - 1 - i] = z;
        rule.weights[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        rule.weights[n - 1 - i] = rule.weights[i];
    }
    return rule;
}

inline QuadratureRule gauss_legendre(int n, double a, double b) {
    QuadratureRule rule = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    for (std::size_t i = 0; i < rule.size(); ++i) {
        rule.nodes[i] = mid + half * rule.nodes[i];
        rule.weights[i] *= half;
    }
    return rule;
}

template <class F>
double integrate(const F& f, const QuadratureRule& rule) {
    double s = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
    return s;
}

template <class F>
double integrate(const F& f, double a, double b, int n = 64) {
    return integrate(f, gauss_legendre(n, a, b));
}

// Sorted interior breakpoints clipped to [a,b]; returns the full partition
// a = t_0 < t_1 < ... < t_m = b with duplicates (within 1e-14 of span) merged.
inline std::vector<double> make_partition(double a, double b, std::vector<double> breaks) {
    std::vector<double> t{a, b};
    for (double c : breaks)
        if (c > a && c < b) t.push_back(c);
    std::sort(t.begin(), t.end());
    const double eps = 1e-14 * (std::abs(a) + std::abs(b) + (b - a));
    std::vector<double> out;
    for (double v : t)
        if (out.empty() || v - out.back() > eps) out.push_back(v);
    if (out.size() < 2 || out.back() != b) out.push_back(b);
    return out;
}

// Splits pieces longer than max_len into equal parts so a fixed-order rule
// keeps resolving oscillatory integrands. max_len <= 0 disables splitting.
inline std::vector<double> refine_partition(const std::vector<double>& t, double max_len) {
    if (!(max_len > 0.0)) return t;
    std::vector<double> out;
    out.push_back(t.front());
    for (std::size_t p = 0; p + 1 < t.size(); ++p) {
        const double len = t[p + 1] - t[p];
        const int k = std::max(1, static_cast<int>(std::ceil(len / max_len)));
        for (int j = 1; j <= k; ++j) out.push_back(t[p] + len * j / k);
    }
    return out;
}

// Composite Gauss-Legendre with explicit breakpoints; the integrand may jump
// or kink at a breakpoint but must be smooth inside each piece.
template <class F>
double integrate_piecewise(const F& f, double a, double b,
                           const std::vector<double>& breaks, int n_per_piece = 64,
                           double max_piece_len = 0.0) {
    const std::vector<double> t = refine_partition(make_partition(a, b, breaks), max_piece_len);
    double s = 0.0;
    for (std::size_t p = 0; p + 1 < t.size(); ++p)
        s += integrate(f, gauss_legendre(n_per_piece, t[p], t[p + 1]));
    return s;
}

// Tensor-product rule over [a,b]^2 with shared axis breakpoints.
template <class F2>
double integrate2d_piecewise(const F2& f, double a, double b,
                             const std::vector<double>& breaks, int n_per_piece = 32,
                             double max_piece_len = 0.0) {
    const std::vector<double> t = refine_partition(make_partition(a, b, breaks), max_piece_len);
    std::vector<QuadratureRule> rules;
    rules.reserve(t.size() - 1);
    for (std::size_t p = 0; p + 1 < t.size(); ++p)
        rules.push_back(gauss_legendre(n_per_piece, t[p], t[p + 1]));
    double s = 0.0;
    for (const auto& rx : rules)
        for (const auto& ry : rules)
            for (std::size_t i = 0; i < rx.size(); ++i) {
                double row = 0.0;
                for (std::size_t j = 0; j < ry.size(); ++j)
                    row += ry.weights[j] * f(rx.nodes[i], ry.nodes[j]);
                s += rx.weights[i] * row;
            }
    return s;
}

} // namespace dpp
