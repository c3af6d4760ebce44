#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "dpp/discretize.hpp"
#include "dpp/functionals.hpp"
#include "dpp/sampler.hpp"

using Catch::Approx;
using namespace dpp;

TEST_CASE("test function parsing") {
    CHECK(make_test_fn("indicator:-1:1")(0.0) == 1.0);
    CHECK(make_test_fn("indicator:-1:1")(2.0) == 0.0);
    CHECK(make_test_fn("bump:0:1")(0.0) == Approx(1.0));
    CHECK(make_test_fn("bump:0:1")(0.999) < 1e-100);
    CHECK(make_test_fn("gaussian:0:1")(0.0) == Approx(1.0));
    CHECK(make_test_fn("hat:0:1")(0.0) == Approx(1.0));
    CHECK(make_test_fn("hat:0:1")(0.5) == Approx(0.5));
    CHECK(make_test_fn("cosine:2")(0.25) == Approx(std::cos(0.5)).margin(1e-14));
    CHECK_THROWS_AS(make_test_fn("sigmoid:0:1"), PreconditionError);
    CHECK_THROWS_AS(make_test_fn("indicator:1:-1"), PreconditionError);
    CHECK_THROWS_AS(make_test_fn("bump:0:xyz"), PreconditionError);
}

TEST_CASE("additive statistic sums the test function") {
    const Configuration X = Configuration::from_points({-0.5, 0.2, 3.0});
    const TestFn ind = indicator_fn(-1.0, 1.0);
    CHECK(additive(ind, X) == Approx(2.0));
    const TestFn g = gaussian_fn(0.0, 1.0);
    CHECK(additive(g, X) ==
          Approx(std::exp(-0.125) + std::exp(-0.02) + std::exp(-4.5)).epsilon(1e-14));
}

TEST_CASE("expected additive value under the sine process") {
    const KernelModel k = KernelModel::sine({-10.0, 10.0});
    QuadratureDiagnostic diag;
    const double v = expected_additive(indicator_fn(-1.0, 1.0), k, 48, &diag);
    CHECK(v == Approx(2.0).epsilon(1e-12));  // unit density
    CHECK(diag.converged);
}

TEST_CASE("centered statistic of a full-window indicator on hermite") {
    const KernelModel k = KernelModel::hermite(4, {-8.0, 8.0});
    const Configuration X = Configuration::from_points({-1.0, 0.0, 1.0, 2.5});
    // any 4-point configuration keeps S - E S = 4 - trace = 0 up to quadrature
    CHECK(std::abs(normalized_additive(indicator_fn(-8.0, 8.0), k, X)) < 1e-6);
}

TEST_CASE("exact variance identity matches the seminorm for projections") {
    // For a projection kernel living inside the window the two quadrature
    // routes compute the same number.
    const KernelModel k = KernelModel::hermite(4, {-8.0, 8.0});
    for (const char* spec : {"gaussian:0:1", "indicator:0:1", "hat:0.3:1"}) {
        const TestFn f = make_test_fn(spec);
        const double exact = variance_of_additive(f, k);
        const double semi = variance_norm_sq(f, k);
        CHECK(exact == Approx(semi).epsilon(1e-6));
    }
}

TEST_CASE("monte carlo variance matches the quadrature oracle") {
    const KernelModel k = KernelModel::hermite(4, {-8.0, 8.0});
    const DiscretizedKernel d = discretize(k, 200);
    const TestFn f = gaussian_fn(0.0, 1.0);
    const double oracle = variance_of_additive(f, k);
    Rng rng = make_stream(13, 0);
    RunningStat stat;
    for (int s = 0; s < 4000; ++s) stat.add(additive(f, sample_dpp(d, rng)));
    const Estimate var = stat.variance_estimate();
    CHECK(std::abs(var.value - oracle) < 3.5 * var.std_err);
}

TEST_CASE("sine indicator variance against the translation-invariant integral") {
    // Var N[-1,1] = L - 2 int_0^L (L-u) K(u)^2 du with K(u) = sin(pi u)/(pi u),
    // an independent one-dimensional reduction of the same quantity.
    const double L = 2.0;
    auto ksq = [](double u) {
        if (std::abs(u) < 1e-12) return 1.0;
        const double s = std::sin(M_PI * u) / (M_PI * u);
        return s * s;
    };
    const double exact =
        L - 2.0 * integrate_piecewise([&](double u) { return (L - u) * ksq(u); }, 0.0, L,
                                      {}, 96, 0.5);

    const KernelModel wide = KernelModel::sine({-100.0, 100.0});
    const double semi = variance_norm_sq(indicator_fn(-1.0, 1.0), wide, 16);
    CHECK(semi == Approx(exact).margin(5e-3));  // window tail ~ 2/(pi^2 * 99)

    // sanity: the log-growth asymptotic (ln(2 pi L) + gamma + 1)/pi^2 is
    // already accurate to a few parts in a thousand at L = 2
    const double gamma = 0.57721566490153286;
    const double asym = (std::log(2.0 * M_PI * L) + gamma + 1.0) / (M_PI * M_PI);
    CHECK(exact == Approx(asym).margin(2e-2));
}

TEST_CASE("cutoff spec validates its geometry") {
    CHECK_NOTHROW(CutoffSpec(5.0, 0.1, 0.0));
    CHECK_THROWS_AS(CutoffSpec(5.0, 1.0, 0.0), PreconditionError);   // delta too big
    CHECK_THROWS_AS(CutoffSpec(5.0, 0.0, 0.0), PreconditionError);   // delta zero
    CHECK_THROWS_AS(CutoffSpec(1.0, 0.1, 0.5), PreconditionError);   // R too small
    CHECK_THROWS_AS(CutoffSpec(5.0, 0.1, 0.0, 1.5), PreconditionError);  // b too far
}

TEST_CASE("regularized coulomb sum, hand values") {
    const Configuration X = Configuration::from_points({-2.0, 0.5, 10.0});
    const CutoffSpec tight(5.0, 0.1, 0.0);
    // keeps 0.5 and -2; drops 10 (outside R)
    CHECK(regularized_coulomb(tight, X) == Approx(-3.0).epsilon(1e-14));

    const CutoffSpec wide_collar(5.0, 0.6, 0.0);
    // 0.5 now falls inside the collar, only -2 contributes
    CHECK(regularized_coulomb(wide_collar, X) == Approx(1.0).epsilon(1e-14));
}

TEST_CASE("paired coulomb sum excises both collars") {
    const Configuration X = Configuration::from_points({-2.0, 0.35, 0.6});
    const CutoffSpec spec(5.0, 0.1, 0.3, 0.4);
    // 0.35 is within delta of both a = 0.3 and b = 0.4; 0.6 survives both.
    // Sum is centered at b: 2/(0.4 - 0.6) + 2/(0.4 + 2) = -10 + 5/6.
    CHECK(regularized_coulomb_pair(spec, X) ==
          Approx(-10.0 + 2.0 / 2.4).epsilon(1e-12));
}

TEST_CASE("multiplicative statistics") {
    const Configuration empty;
    auto g = [](double x) { return 1.0 + x * x; };
    CHECK(multiplicative(g, empty) == 1.0);

    const Configuration X = Configuration::from_points({0.0, 2.0});
    CHECK(multiplicative(g, X) == Approx(5.0));
    auto zero_at_two = [](double x) { return x - 2.0; };
    CHECK(multiplicative(zero_at_two, X) == 0.0);
}

TEST_CASE("tilde multiplicative centers the log product") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    TestFn g;
    g.f = [](double) { return 2.0; };
    // constant g: product is 2^N with N = 2 a.s., centering removes it
    const Configuration X = Configuration::from_points({-0.3, 1.1});
    CHECK(tilde_multiplicative(g, k, X) == Approx(1.0).epsilon(1e-9));

    TestFn dips;
    dips.f = [](double x) { return x < 0.0 ? -1.0 : 1.0; };
    dips.breakpoints = {0.0};
    CHECK_THROWS_AS(tilde_multiplicative(dips, X, 0.0), DomainError);
}

TEST_CASE("normalized multiplicative has unit in-sample mean") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    TestFn g;
    g.f = [](double x) { return 1.0 + std::exp(-x * x); };
    std::vector<Configuration> samples = {
        Configuration::from_points({-0.5, 0.8}), Configuration::from_points({0.1, 1.4}),
        Configuration::from_points({-1.2, 0.3})};
    const NormalizedMultiplicative nm = normalized_multiplicative(g, k, samples);
    double mean = 0.0;
    for (double v : nm.values) mean += v;
    mean /= nm.values.size();
    CHECK(mean == Approx(1.0).margin(1e-12));
    CHECK(nm.normalizer.value > 0.0);
}

TEST_CASE("normalized multiplicative rejects a noisy normalizer") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    TestFn g;
    g.f = [](double x) { return (x > -0.2 && x < 0.2) ? 1e-6 : 1.0; };
    g.breakpoints = {-0.2, 0.2};
    // one sample hits the dip, the other does not: relative stderr ~ 1
    std::vector<Configuration> samples = {Configuration::from_points({0.0, 3.0}),
                                          Configuration::from_points({1.0, 3.0})};
    CHECK_THROWS_AS(normalized_multiplicative(g, k, samples), DegenerateError);
}

TEST_CASE("g-space distance basics") {
    const KernelModel k = KernelModel::hermite(4, {-8.0, 8.0});
    const GSpaceParams params(0.5, 1e-3, 10.0, Window{-0.5, 0.5}, Window{-1.0, 1.0});

    TestFn g1;
    g1.f = [](double x) { return 1.0 + 0.5 * std::exp(-x * x); };
    TestFn g2;
    g2.f = [](double x) { return 1.0 + 0.3 * std::exp(-x * x); };

    CHECK(g_distance(g1, g1, params, k) == Approx(0.0).margin(1e-14));
    const double d12 = g_distance(g1, g2, params, k);
    CHECK(d12 > 0.0);
    CHECK(g_distance(g2, g1, params, k) == Approx(d12).epsilon(1e-12));

    // widen the perturbation, the distance grows
    TestFn g3;
    g3.f = [](double x) { return 1.0 + 0.1 * std::exp(-x * x); };
    CHECK(g_distance(g1, g3, params, k) > d12);
}

TEST_CASE("g-space distance demands a contractive restriction") {
    // the sine kernel restricted to a length-12 interval has top eigenvalue
    // indistinguishable from 1, which the metric precondition must reject;
    // a length-4 restriction is still (barely) contractive
    const KernelModel s = KernelModel::sine({-10.0, 10.0});
    const double n2 = restricted_operator_norm(s, Window{-2.0, 2.0});
    const double n6 = restricted_operator_norm(s, Window{-6.0, 6.0});
    CHECK(n2 < n6);
    CHECK(n2 < 1.0 - 1e-9);
    CHECK(n6 > 1.0 - 1e-9);
    CHECK(restricted_operator_norm(KernelModel::hermite(4, {-8.0, 8.0}),
                                   Window{-1.0, 1.0}) < 1.0 - 1e-9);

    const GSpaceParams params(0.5, 1e-3, 10.0, Window{-1.0, 1.0}, Window{-6.0, 6.0});
    TestFn g1;
    g1.f = [](double) { return 1.0; };
    CHECK_THROWS_AS(g_distance(g1, g1, params, s), PreconditionError);
}

TEST_CASE("gaussian-like params are validated") {
    CHECK_THROWS_AS(GSpaceParams(1.5, 1e-3, 10.0, Window{-1.0, 1.0}, Window{-2.0, 2.0}),
                    PreconditionError);
    CHECK_THROWS_AS(GSpaceParams(0.5, 0.0, 10.0, Window{-1.0, 1.0}, Window{-2.0, 2.0}),
                    PreconditionError);
    CHECK_THROWS_AS(GSpaceParams(0.5, 1e-3, 10.0, Window{-3.0, 1.0}, Window{-2.0, 2.0}),
                    PreconditionError);
}
