#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>

#include "dpp/defaults.hpp"
#include "dpp/errors.hpp"
#include "dpp/special.hpp"
#include "dpp/window.hpp"

namespace dpp {

// Kernel in integrable form
//   Pi(x,y) = scale * (A(x)B(y) - A(y)B(x)) / (x - y),
//   Pi(x,x) = scale * (A'(x)B(x) - A(x)B'(x)).
struct IntegrableKernel {
    std::function<double(double)> A, B, dA, dB;
    double scale = 1.0;

    double off_diagonal(double x, double y) const {
        return scale * (A(x) * B(y) - A(y) * B(x)) / (x - y);
    }

    double diagonal(double x) const {
        return scale * (dA(x) * B(x) - A(x) * dB(x));
    }

    // Near the diagonal the difference quotient cancels catastrophically;
    // the midpoint diagonal value is the second-order Taylor expansion of the
    // quotient in (x-y)/2.
    double eval(double x, double y) const {
        if (std::abs(x - y) < defaults::diag_switch_threshold)
            return diagonal(0.5 * (x + y));
        return off_diagonal(x, y);
    }
};

enum class KernelFamily { Sine, Bessel, Hermite, Custom };

// One of the integrable-kernel families restricted to a window. Evaluation
// outside the window (or at x <= 0 for Bessel) is a domain error.
class KernelModel {
public:
    static KernelModel sine(Window w) {
        KernelModel k;
        k.family_ = KernelFamily::Sine;
        k.window_ = w;
        k.rep_.A = [](double x) { return std::sin(M_PI * x); };
        k.rep_.B = [](double x) { return std::cos(M_PI * x); };
        k.rep_.dA = [](double x) { return M_PI * std::cos(M_PI * x); };
        k.rep_.dB = [](double x) { return -M_PI * std::sin(M_PI * x); };
        k.rep_.scale = 1.0 / M_PI;
        return k;
    }

    // Christoffel-Darboux form of the rank-N Hermite projection:
    //   Pi_N(x,y) = sqrt(N/2) (phi_N(x)phi_{N-1}(y) - phi_N(y)phi_{N-1}(x)) / (x-y)
    // which equals sum_{k<N} phi_k(x)phi_k(y).
    static KernelModel hermite(int n, Window w) {
        if (n < 1) throw PreconditionError("hermite kernel: N must be >= 1");
        KernelModel k;
        k.family_ = KernelFamily::Hermite;
        k.hermite_n_ = n;
        k.window_ = w;
        k.rep_.A = [n](double x) { return hermite_pair(n, x).first; };
        k.rep_.B = [n](double x) { return hermite_pair(n, x).second; };
        k.rep_.dA = [n](double x) {
            auto [pn, pnm1] = hermite_pair(n, x);
            return hermite_fn_deriv(n, x, pn, pnm1);
        };
        k.rep_.dB = [n](double x) {
            auto [pnm1, pnm2] = hermite_pair(n - 1, x);
            return hermite_fn_deriv(n - 1, x, pnm1, pnm2);
        };
        k.rep_.scale = std::sqrt(0.5 * n);
        return k;
    }

    // Bessel kernel on (0, infinity) in the variable x = t^2:
    //   A(x) = J_s(sqrt x), B(x) = sqrt(x) J_s'(sqrt x), scale = 1/2.
    // B'(x) reduces through the Bessel ODE to (s^2 - x) J_s(sqrt x) / (2x).
    static KernelModel bessel(double s, Window w) {
        if (!(s > -1.0)) throw PreconditionError("bessel kernel: s must be > -1");
        if (w.lo < 0.0) throw PreconditionError("bessel kernel: window must satisfy lo >= 0");
        KernelModel k;
        k.family_ = KernelFamily::Bessel;
        k.bessel_s_ = s;
        k.window_ = w;
        k.rep_.A = [s](double x) { return bessel_j(s, std::sqrt(x)); };
        k.rep_.B = [s](double x) {
            const double t = std::sqrt(x);
            return t * bessel_j_deriv(s, t);
        };
        k.rep_.dA = [s](double x) {
            const double t = std::sqrt(x);
            return bessel_j_deriv(s, t) / (2.0 * t);
        };
        k.rep_.dB = [s](double x) {
            return (s * s - x) * bessel_j(s, std::sqrt(x)) / (2.0 * x);
        };
        k.rep_.scale = 0.5;
        return k;
    }

    static KernelModel custom(IntegrableKernel rep, Window w) {
        KernelModel k;
        k.family_ = KernelFamily::Custom;
        k.window_ = w;
        k.rep_ = std::move(rep);
        return k;
    }

    KernelFamily family() const { return family_; }
    const Window& window() const { return window_; }
    const IntegrableKernel& rep() const { return rep_; }
    int hermite_order() const { return hermite_n_; }
    double bessel_order() const { return bessel_s_; }

    void check_domain(double x) const {
        if (!window_.contains(x))
            throw DomainError("kernel evaluation outside window");
        if (family_ == KernelFamily::Bessel && !(x > 0.0))
            throw DomainError("bessel kernel requires x > 0");
    }

    double eval(double x, double y) const {
        check_domain(x);
        check_domain(y);
        return rep_.eval(x, y);
    }

    double intensity(double x) const {
        check_domain(x);
        return rep_.diagonal(x);
    }

    // d/da log rho_1(a). Closed form for Sine (rho is constant) and Hermite
    // (the Hermite ODE collapses the derivative of the Christoffel-Darboux
    // diagonal to rho' = -sqrt(2N) phi_N phi_{N-1}); central differences with
    // step 1e-5 otherwise.
    double intensity_log_derivative(double a) const {
        check_domain(a);
        const double rho = rep_.diagonal(a);
        if (!(rho > defaults::intensity_floor))
            throw DegenerateError("intensity_log_derivative: first intensity vanishes at a");
        switch (family_) {
        case KernelFamily::Sine:
            return 0.0;
        case KernelFamily::Hermite: {
            auto [pn, pnm1] = hermite_pair(hermite_n_, a);
            return -std::sqrt(2.0 * hermite_n_) * pn * pnm1 / rho;
        }
        default: {
            const double h = defaults::fd_step;
            if (!window_.contains(a - h) || !window_.contains(a + h))
                throw DomainError("intensity_log_derivative: a +/- h leaves the window");
            const double rp = rep_.diagonal(a + h), rm = rep_.diagonal(a - h);
            if (!(rp > 0.0) || !(rm > 0.0))
                throw DegenerateError("intensity_log_derivative: intensity vanishes near a");
            return (std::log(rp) - std::log(rm)) / (2.0 * h);
        }
        }
    }

    std::string describe() const {
        switch (family_) {
        case KernelFamily::Sine: return "sine";
        case KernelFamily::Bessel: return "bessel:" + std::to_string(bessel_s_);
        case KernelFamily::Hermite: return "hermite:" + std::to_string(hermite_n_);
        default: return "custom";
        }
    }

private:
    // phi_n and phi_{n-1} in one recurrence pass, no allocation.
    static std::pair<double, double> hermite_pair(int n, double x) {
        double prev = 0.0;
        double cur = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
        for (int k = 0; k < n; ++k) {
            const double next = x * std::sqrt(2.0 / (k + 1)) * cur
                              - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
            prev = cur;
            cur = next;
        }
        return {cur, prev}; // {phi_n, phi_{n-1}}
    }

    KernelFamily family_ = KernelFamily::Custom;
    Window window_;
    IntegrableKernel rep_;
    int hermite_n_ = 0;
    double bessel_s_ = 0.0;
};

inline double eval_kernel(const KernelModel& k, double x, double y) { return k.eval(x, y); }
inline double first_intensity(const KernelModel& k, double x) { return k.intensity(x); }
inline double intensity_log_derivative(const KernelModel& k, double a) {
    return k.intensity_log_derivative(a);
}

// Parses "sine", "hermite:<N>", or "bessel:<s>" as used by flags and configs.
inline KernelModel parse_kernel_spec(const std::string& spec, Window w) {
    const auto colon = spec.find(':');
    const std::string head = spec.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
        if (head == "sine") {
            if (!arg.empty()) throw PreconditionError("sine kernel takes no parameter");
            return KernelModel::sine(w);
        }
        if (head == "hermite") {
            if (arg.empty()) throw PreconditionError("hermite kernel needs :<N>");
            return KernelModel::hermite(std::stoi(arg), w);
        }
        if (head == "bessel") {
            if (arg.empty()) throw PreconditionError("bessel kernel needs :<s>");
            return KernelModel::bessel(std::stod(arg), w);
        }
    } catch (const std::invalid_argument&) {
        throw PreconditionError("bad kernel parameter in '" + spec + "'");
    } catch (const std::out_of_range&) {
        throw PreconditionError("kernel parameter out of range in '" + spec + "'");
    }
    throw PreconditionError("unknown kernel spec '" + spec + "' (want sine|hermite:<N>|bessel:<s>)");
}

// Anything evaluable as a symmetric kernel with an intensity on a window.
template <class K>
concept PointKernel = requires(const K& k, double x, double y) {
    { k.eval(x, y) } -> std::convertible_to<double>;
    { k.intensity(x) } -> std::convertible_to<double>;
    { k.window() } -> std::convertible_to<Window>;
};

} // namespace dpp
