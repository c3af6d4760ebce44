#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "dpp/discretize.hpp"
#include "dpp/kernel.hpp"

using Catch::Approx;
using namespace dpp;

namespace {
const Window wide{-10.0, 10.0};
}

TEST_CASE("sine kernel closed-form values") {
    const KernelModel k = KernelModel::sine(wide);
    CHECK(k.eval(0.5, 0.5) == Approx(1.0).margin(1e-15));      // unit density
    CHECK(k.eval(0.0, 0.5) == Approx(2.0 / M_PI).epsilon(1e-14));
    CHECK(k.eval(0.0, 1.0) == Approx(0.0).margin(1e-15));      // integer zero
    CHECK(k.intensity(3.7) == Approx(1.0).margin(1e-15));
    CHECK(k.eval(0.3, -0.2) == Approx(k.eval(-0.2, 0.3)).margin(1e-15));
}

TEST_CASE("near-diagonal branch is continuous") {
    // straddle the evaluation switch with a tiny true separation so that a
    // jump between the two branches would dominate the kernel's own variation
    const double below = 1e-6 * (1.0 - 1e-4);
    const double above = 1e-6 * (1.0 + 1e-4);
    const double x = 0.3;

    const KernelModel k = KernelModel::sine(wide);
    CHECK(std::abs(k.eval(x, x + below) - k.eval(x, x + above)) < 1e-8);

    const KernelModel h = KernelModel::hermite(5, {-8.0, 8.0});
    CHECK(std::abs(h.eval(x, x + below) - h.eval(x, x + above)) < 1e-8);
}

TEST_CASE("hermite intensity matches the one-level closed form") {
    const KernelModel h1 = KernelModel::hermite(1, {-8.0, 8.0});
    CHECK(h1.intensity(0.0) == Approx(1.0 / std::sqrt(M_PI)).epsilon(1e-14));
    for (double x : {0.4, -1.1, 2.0})
        CHECK(h1.intensity(x) == Approx(std::exp(-x * x) / std::sqrt(M_PI)).epsilon(1e-13));
}

TEST_CASE("hermite intensity log-derivative closed form") {
    // N = 1: rho ~ exp(-x^2), so the log-derivative is -2x.
    const KernelModel h1 = KernelModel::hermite(1, {-8.0, 8.0});
    CHECK(h1.intensity_log_derivative(0.3) == Approx(-0.6).epsilon(1e-10));

    // higher N against a central finite difference of log rho
    const KernelModel h6 = KernelModel::hermite(6, {-8.0, 8.0});
    for (double a : {0.0, 0.7, -1.3}) {
        const double hstep = 1e-5;
        const double fd = (std::log(h6.intensity(a + hstep)) -
                           std::log(h6.intensity(a - hstep))) / (2.0 * hstep);
        CHECK(h6.intensity_log_derivative(a) == Approx(fd).margin(1e-6));
    }
}

TEST_CASE("sine intensity log-derivative vanishes") {
    const KernelModel k = KernelModel::sine(wide);
    for (double a : {0.0, 0.31, -2.7}) CHECK(std::abs(k.intensity_log_derivative(a)) < 1e-12);
}

TEST_CASE("bessel kernel basic sanity") {
    const Window half{0.05, 20.0};
    const KernelModel b = KernelModel::bessel(0.5, half);
    CHECK(b.eval(1.0, 2.0) == Approx(b.eval(2.0, 1.0)).margin(1e-15));
    CHECK(b.intensity(1.0) > 0.0);
    CHECK(std::isfinite(b.eval(0.1, 0.1)));

    // reflection range
    const KernelModel br = KernelModel::bessel(-0.5, half);
    CHECK(std::isfinite(br.intensity(0.5)));
    CHECK(br.intensity(0.5) > 0.0);
}

TEST_CASE("custom kernel reproduces sine when given its representation") {
    IntegrableKernel rep;
    rep.A = [](double x) { return std::sin(M_PI * x); };
    rep.B = [](double x) { return std::cos(M_PI * x); };
    rep.dA = [](double x) { return M_PI * std::cos(M_PI * x); };
    rep.dB = [](double x) { return -M_PI * std::sin(M_PI * x); };
    rep.scale = 1.0 / M_PI;
    const KernelModel c = KernelModel::custom(rep, wide);
    const KernelModel s = KernelModel::sine(wide);
    for (double x : {-3.0, 0.1, 0.5})
        for (double y : {-1.0, 0.1000001, 2.5})
            CHECK(c.eval(x, y) == Approx(s.eval(x, y)).margin(1e-14));
}

TEST_CASE("kernel domain checks") {
    const KernelModel k = KernelModel::sine(wide);
    CHECK_THROWS_AS(k.eval(11.0, 0.0), DomainError);
    CHECK_THROWS_AS(k.intensity(-10.5), DomainError);
    CHECK_THROWS_AS(KernelModel::hermite(0, wide), PreconditionError);
    CHECK_THROWS_AS(KernelModel::bessel(-1.5, {0.1, 5.0}), PreconditionError);
}

TEST_CASE("parse_kernel_spec round-trips and rejects junk") {
    CHECK(parse_kernel_spec("sine", wide).describe() == "sine");
    CHECK(parse_kernel_spec("hermite:6", {-8.0, 8.0}).describe() == "hermite:6");
    CHECK(parse_kernel_spec("bessel:0.5", {0.1, 5.0}).describe().rfind("bessel:", 0) == 0);
    CHECK_THROWS_AS(parse_kernel_spec("fourier", wide), PreconditionError);
    CHECK_THROWS_AS(parse_kernel_spec("hermite", wide), PreconditionError);
    CHECK_THROWS_AS(parse_kernel_spec("hermite:x", wide), PreconditionError);
    CHECK_THROWS_AS(parse_kernel_spec("sine:3", wide), PreconditionError);
}

TEST_CASE("assumption checks pass for the projection families") {
    const AssumptionReport s = check_assumption2(KernelModel::sine({-6.0, 6.0}));
    CHECK(s.symmetric_ok);
    CHECK(s.spectrum_ok);
    CHECK(s.smooth_ok);
    CHECK(s.integrable_ok);
    CHECK(s.ok());
    // unit density against the Cauchy weight: int 1/(1+x^2) = 2 atan(6)
    CHECK(s.intensity_integral == Approx(2.0 * std::atan(6.0)).epsilon(1e-9));

    const AssumptionReport h = check_assumption2(KernelModel::hermite(4, {-8.0, 8.0}));
    CHECK(h.ok());
    // int rho_4(x)/(1+x^2) dx over [-8,8], adaptive quadrature cross-check
    CHECK(h.intensity_integral == Approx(2.0036179119836586).margin(1e-7));
}
