#pragma once

#include <cmath>
#include <vector>

#include "dpp/errors.hpp"

namespace dpp {

// Hermite functions phi_k, orthonormal in L^2(R) with the weight e^{-x^2}
// folded in: phi_0(x) = pi^{-1/4} e^{-x^2/2} and
//   phi_{k+1}(x) = x sqrt(2/(k+1)) phi_k(x) - sqrt(k/(k+1)) phi_{k-1}(x).
// The normalized recurrence keeps every term O(1); no factorials appear.
inline std::vector<double> hermite_fn(int n_max, double x) {
    if (n_max < 0) throw PreconditionError("hermite_fn: n_max must be >= 0");
    std::vector<double> phi(static_cast<std::size_t>(n_max) + 1);
    const double phi0 = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
    phi[0] = phi0;
    if (n_max == 0) return phi;
    phi[1] = std::sqrt(2.0) * x * phi0;
    for (int k = 1; k < n_max; ++k)
        phi[k + 1] = x * std::sqrt(2.0 / (k + 1)) * phi[k]
                   - std::sqrt(static_cast<double>(k) / (k + 1)) * phi[k - 1];
    return phi;
}

// phi_k'(x) = -x phi_k(x) + sqrt(2k) phi_{k-1}(x)
inline double hermite_fn_deriv(int k, double x, double phi_k, double phi_km1) {
    if (k == 0) return -x * phi_k;
    return -x * phi_k + std::sqrt(2.0 * k) * phi_km1;
}

// Bessel J_nu for nu > -1, x > 0. std::cyl_bessel_j rejects negative order,
// so nu in (-1,0) goes through the reflection
//   J_{-mu}(x) = J_mu(x) cos(mu pi) - Y_mu(x) sin(mu pi),  mu = -nu in (0,1).
inline double bessel_j(double nu, double x) {
    if (!(x > 0.0)) throw DomainError("bessel_j: x must be > 0");
    if (!(nu > -1.0)) throw PreconditionError("bessel_j: order must be > -1");
    if (nu >= 0.0) return std::cyl_bessel_j(nu, x);
    const double mu = -nu;
    return std::cyl_bessel_j(mu, x) * std::cos(mu * M_PI)
         - std::cyl_neumann(mu, x) * std::sin(mu * M_PI);
}

// J_nu'(x) = (nu/x) J_nu(x) - J_{nu+1}(x)
inline double bessel_j_deriv(double nu, double x) {
    return (nu / x) * bessel_j(nu, x) - bessel_j(nu + 1.0, x);
}

} // namespace dpp
