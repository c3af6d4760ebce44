#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "dpp/discretize.hpp"
#include "dpp/estimate.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/sampler.hpp"

using Catch::Approx;
using namespace dpp;

TEST_CASE("discretized sine kernel keeps trace and spectrum") {
    const DiscretizedKernel d = discretize(KernelModel::sine({-10.0, 10.0}), 200);
    CHECK(d.trace == Approx(20.0).epsilon(1e-3));
    CHECK(d.eigenvalues.minCoeff() >= 0.0);
    CHECK(d.eigenvalues.maxCoeff() <= 1.0);
    CHECK(d.rank >= 20);
    // descending order
    for (int j = 1; j < d.n(); ++j) CHECK(d.eigenvalues[j] <= d.eigenvalues[j - 1]);
}

TEST_CASE("discretized hermite kernel is a rank-N projection") {
    const DiscretizedKernel d = discretize(KernelModel::hermite(4, {-8.0, 8.0}), 200);
    for (int j = 0; j < 4; ++j) CHECK(d.eigenvalues_raw[j] == Approx(1.0).margin(1e-6));
    CHECK(std::abs(d.eigenvalues_raw[4]) < 1e-6);
    CHECK(d.trace == Approx(4.0).epsilon(1e-9));
}

TEST_CASE("panel discretization tiles the window") {
    const KernelModel k = KernelModel::sine({-10.0, 10.0});
    const DiscretizedKernel uniform = discretize(k, 200);
    const DiscretizedKernel tiled =
        discretize(k, std::vector<Panel>{{-10.0, -0.5, 80}, {-0.5, 0.5, 48}, {0.5, 10.0, 80}});
    CHECK(tiled.n() == 208);
    CHECK(tiled.trace == Approx(uniform.trace).epsilon(1e-6));
    // nodes ascending across panel joins
    for (int i = 1; i < tiled.n(); ++i) CHECK(tiled.nodes[i] > tiled.nodes[i - 1]);

    CHECK_THROWS_AS(discretize(k, std::vector<Panel>{{-10.0, 0.0, 40}}), PreconditionError);
    CHECK_THROWS_AS(
        discretize(k, std::vector<Panel>{{-10.0, 0.0, 40}, {1.0, 10.0, 40}}),
        PreconditionError);
    CHECK_THROWS_AS(
        discretize(k, std::vector<Panel>{{-10.0, 0.0, 40}, {0.0, 10.0, 2}}),
        PreconditionError);
}

TEST_CASE("hermite samples always carry N points") {
    const DiscretizedKernel d = discretize(KernelModel::hermite(4, {-8.0, 8.0}), 200);
    Rng rng = make_stream(42, 0);
    for (int s = 0; s < 50; ++s) {
        const Configuration X = sample_dpp(d, rng);
        REQUIRE(X.size() == 4);
        for (std::size_t i = 1; i < X.points.size(); ++i)
            CHECK(X.points[i] > X.points[i - 1]);
        for (double x : X.points) {
            CHECK(x >= -8.0);
            CHECK(x <= 8.0);
        }
    }
}

TEST_CASE("sine sample counts match the trace") {
    const DiscretizedKernel d = discretize(KernelModel::sine({-10.0, 10.0}), 200);
    Rng rng = make_stream(7, 0);
    RunningStat count;
    for (int s = 0; s < 2000; ++s) count.add(static_cast<double>(sample_dpp(d, rng).size()));
    const Estimate m = count.mean_estimate();
    CHECK(std::abs(m.value - d.trace) < 4.0 * m.std_err);
}

TEST_CASE("sampling is seed-deterministic with independent streams") {
    const DiscretizedKernel d = discretize(KernelModel::hermite(6, {-8.0, 8.0}), 200);
    Rng r1 = make_stream(99, 0);
    Rng r2 = make_stream(99, 0);
    Rng r3 = make_stream(99, 1);
    const Configuration a = sample_dpp(d, r1);
    const Configuration b = sample_dpp(d, r2);
    const Configuration c = sample_dpp(d, r3);
    REQUIRE(a.points == b.points);
    CHECK(a.points != c.points);
}

TEST_CASE("palm sampler drops exactly one hermite particle") {
    const KernelModel k = KernelModel::hermite(6, {-8.0, 8.0});
    const DiscretizedKernel d = discretize(k, 200);
    const PalmSampler palm(k, d);
    const PalmSampler::Basis basis = palm.prepare(0.37);
    Rng rng = make_stream(5, 0);
    for (int s = 0; s < 300; ++s) {
        const Configuration X = palm.sample_with(basis, rng);
        REQUIRE(X.size() == 5);
    }

    // prepare + sample_with is exactly sample()
    Rng ra = make_stream(11, 0);
    Rng rb = make_stream(11, 0);
    CHECK(palm.sample(0.37, ra).points == palm.sample_with(basis, rb).points);
}

TEST_CASE("palm spectrum loses one unit of mass") {
    const KernelModel k = KernelModel::hermite(6, {-8.0, 8.0});
    const DiscretizedKernel d = discretize(k, 200);
    const PalmSampler palm(k, d);
    const Eigen::VectorXd mu = palm.palm_spectrum(0.37);
    CHECK(mu.sum() == Approx(5.0).margin(1e-6));
    CHECK(mu.maxCoeff() <= 1.0);
    CHECK(mu.minCoeff() >= 0.0);
}

TEST_CASE("empirical intensity tracks the hermite density") {
    const KernelModel k = KernelModel::hermite(1, {-8.0, 8.0});
    const DiscretizedKernel d = discretize(k, 120);
    Rng rng = make_stream(3, 0);
    std::vector<Configuration> samples;
    samples.reserve(3000);
    for (int s = 0; s < 3000; ++s) samples.push_back(sample_dpp(d, rng));
    const IntensityProfile prof = empirical_intensity(samples, k.window(), 16);
    REQUIRE(prof.edges.size() == 17);
    for (int b = 6; b < 10; ++b) {  // central bins where the density lives
        const double lo = prof.edges[b], hi = prof.edges[b + 1];
        const double model =
            integrate([&](double x) { return k.intensity(x); }, lo, hi, 24) / (hi - lo);
        CHECK(std::abs(prof.intensity[b].value - model) <
              4.0 * prof.intensity[b].std_err + 1e-12);
    }
}

TEST_CASE("anchor distribution samples chi-weighted intensity") {
    const KernelModel k = KernelModel::sine({-10.0, 10.0});
    SupportedFn chi;
    chi.f = [](double) { return 1.0; };
    chi.lo = -1.0;
    chi.hi = 1.0;
    const AnchorDistribution anchors(k, chi);
    CHECK(anchors.normalizer() == Approx(2.0).epsilon(1e-6));  // rho = 1 on the box
    Rng rng = make_stream(21, 0);
    RunningStat pos;
    for (int s = 0; s < 4000; ++s) {
        const double a = anchors.sample(rng);
        CHECK(a >= -1.0);
        CHECK(a <= 1.0);
        pos.add(a);
    }
    const Estimate m = pos.mean_estimate();
    CHECK(std::abs(m.value) < 4.0 * m.std_err);  // symmetric law
}

TEST_CASE("anchor distribution rejects empty or negative mass") {
    const KernelModel k = KernelModel::sine({-10.0, 10.0});
    SupportedFn outside;
    outside.f = [](double) { return 1.0; };
    outside.lo = 11.0;
    outside.hi = 12.0;
    CHECK_THROWS_AS(AnchorDistribution(k, outside), PreconditionError);

    SupportedFn negative;
    negative.f = [](double) { return -1.0; };
    negative.lo = -1.0;
    negative.hi = 1.0;
    CHECK_THROWS_AS(AnchorDistribution(k, negative), PreconditionError);
}

TEST_CASE("campbell sampler pairs anchors with reduced configurations") {
    const KernelModel k = KernelModel::hermite(5, {-8.0, 8.0});
    const DiscretizedKernel d = discretize(k, 200);
    SupportedFn chi;
    chi.f = [](double) { return 1.0; };
    chi.lo = -1.0;
    chi.hi = 1.0;
    const CampbellSampler cs(k, d, chi);
    CHECK(cs.normalizer() > 0.0);
    Rng rng = make_stream(17, 0);
    for (int s = 0; s < 40; ++s) {
        const CampbellSample cb = cs.sample(rng);
        CHECK(cb.anchor >= -1.0);
        CHECK(cb.anchor <= 1.0);
        REQUIRE(cb.config.size() == 4);  // one particle conditioned away
    }
}
