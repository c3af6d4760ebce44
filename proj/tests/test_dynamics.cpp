#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "dpp/dynamics.hpp"
#include "dpp/sampler.hpp"

using Catch::Approx;
using namespace dpp;

namespace {

DiffusionConfig closed_cfg(double dt, double T) {
    DiffusionConfig cfg;
    cfg.dt = dt;
    cfg.t_final = T;
    cfg.mode = DriftMode::ClosedFormHermite;
    return cfg;
}

}  // namespace

TEST_CASE("drift mode names parse both spellings") {
    CHECK(parse_drift_mode("closed") == DriftMode::ClosedFormHermite);
    CHECK(parse_drift_mode("closed_form_hermite") == DriftMode::ClosedFormHermite);
    CHECK(parse_drift_mode("estimated") == DriftMode::EstimatedLogDeriv);
    CHECK(parse_drift_mode("estimated_logderiv") == DriftMode::EstimatedLogDeriv);
    CHECK_THROWS_AS(parse_drift_mode("brownian"), PreconditionError);
    CHECK(drift_mode_name(DriftMode::ClosedFormHermite) == "closed_form_hermite");
}

TEST_CASE("diffusion config validation") {
    CHECK_NOTHROW(closed_cfg(1e-3, 1.0).validate());
    CHECK(closed_cfg(1e-3, 1.0).n_steps() == 1000);

    DiffusionConfig bad = closed_cfg(0.0, 1.0);
    CHECK_THROWS_AS(bad.validate(), PreconditionError);

    bad = closed_cfg(1e-4, 1.0);
    bad.collision_floor = 0.1;  // floor^2 > dt
    CHECK_THROWS_AS(bad.validate(), PreconditionError);

    bad = closed_cfg(0.3, 1.0);  // T/dt not an integer
    CHECK_THROWS_AS(bad.validate(), PreconditionError);

    bad = closed_cfg(1e-3, 1.0);
    bad.mode = DriftMode::EstimatedLogDeriv;  // no schedule supplied
    CHECK_THROWS_AS(bad.validate(), PreconditionError);
}

TEST_CASE("two-particle closed-form drift") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    const Diffusion dyn(k, closed_cfg(1e-3, 1.0));
    const double c = 1.2;
    const std::vector<double> xs = {-c, c};
    CHECK(dyn.drift_at(xs, 0) == Approx(c - 1.0 / (2.0 * c)).epsilon(1e-14));
    CHECK(dyn.drift_at(xs, 1) == Approx(-(c - 1.0 / (2.0 * c))).epsilon(1e-14));

    // equilibrium at c = 1/sqrt(2)
    const double ceq = 1.0 / std::sqrt(2.0);
    const std::vector<double> eq = {-ceq, ceq};
    CHECK(std::abs(dyn.drift_at(eq, 0)) < 1e-14);
    CHECK(std::abs(dyn.drift_at(eq, 1)) < 1e-14);
}

TEST_CASE("drift refuses states below the collision floor") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    const Diffusion dyn(k, closed_cfg(1e-3, 1.0));
    CHECK_THROWS_AS(dyn.drift({0.0, 1e-9}), CollisionError);
    CHECK(min_gap({0.0, 1e-9}) == Approx(1e-9));
}

TEST_CASE("zero-noise step displacement equals drift times dt") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    DiffusionConfig cfg = closed_cfg(1e-3, 1.0);
    cfg.zero_noise = true;
    const Diffusion dyn(k, cfg);
    const DiffusionState s0{{-1.0, 1.0}, 0.0};
    Rng rng = make_stream(1, 0);
    const DiffusionState s1 = dyn.step(s0, rng);
    const std::vector<double> d = dyn.drift(s0.xs);
    CHECK((s1.xs[0] - s0.xs[0]) / cfg.dt == Approx(d[0]).epsilon(1e-12));
    CHECK((s1.xs[1] - s0.xs[1]) / cfg.dt == Approx(d[1]).epsilon(1e-12));
    CHECK(s1.time == Approx(cfg.dt));
}

TEST_CASE("zero-noise two-particle gap settles at the closed-form equilibrium") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    DiffusionConfig cfg = closed_cfg(1e-3, 5.0);
    cfg.zero_noise = true;
    const Diffusion dyn(k, cfg);
    Rng rng = make_stream(2, 0);
    const DiffusionState end = dyn.run(DiffusionState{{-1.0, 1.0}, 0.0}, rng);
    CHECK(end.xs[1] - end.xs[0] == Approx(std::sqrt(2.0)).margin(1e-3));
    CHECK(end.time == Approx(5.0).margin(1e-9));
}

TEST_CASE("estimated drift agrees with the closed form on hermite states") {
    const KernelModel k = KernelModel::hermite(6, {-8.0, 8.0});
    const DiscretizedKernel d = discretize(k, 200);

    DiffusionConfig est = closed_cfg(1e-3, 1.0);
    est.mode = DriftMode::EstimatedLogDeriv;
    est.schedule = RegularizationSchedule({{6.5, 0.002}, {7.5, 0.001}});
    const Diffusion dyn_est(k, est);
    const Diffusion dyn_closed(k, closed_cfg(1e-3, 1.0));

    Rng rng = make_stream(8, 0);
    int checked = 0;
    for (int trial = 0; trial < 20 && checked < 5; ++trial) {
        const Configuration X = sample_dpp(d, rng);
        if (X.size() != 6 || min_gap(X.points) < 0.01) continue;
        bool inside = true;
        for (double x : X.points)
            if (std::abs(x) > 7.4) inside = false;
        if (!inside) continue;
        for (std::size_t i = 0; i < X.points.size(); ++i) {
            const double a = dyn_est.drift_at(X.points, i);
            const double b = dyn_closed.drift_at(X.points, i);
            CHECK(std::abs(a - b) < 1e-3);
        }
        ++checked;
    }
    REQUIRE(checked == 5);
}

TEST_CASE("observer sees every step of a run") {
    const KernelModel k = KernelModel::hermite(2, {-8.0, 8.0});
    const Diffusion dyn(k, closed_cfg(1e-2, 0.1));
    Rng rng = make_stream(3, 0);
    int calls = 0;
    double last_time = -1.0;
    dyn.run(DiffusionState{{-1.0, 1.0}, 0.0}, rng, [&](const DiffusionState& s) {
        ++calls;
        CHECK(s.time > last_time);
        last_time = s.time;
    });
    CHECK(calls == 11);  // initial state plus ten steps
    CHECK(last_time == Approx(0.1));
}

TEST_CASE("stationarity run with no steps is exactly stationary") {
    const KernelModel k = KernelModel::hermite(4, {-8.0, 8.0});
    const StationarityReport rep = stationarity_run(k, closed_cfg(1e-3, 0.0), 50, 9);
    CHECK(rep.stationary);
    CHECK(rep.max_abs_z == 0.0);
    CHECK(rep.gap_distance == 0.0);
    CHECK(rep.collision_rate == 0.0);
    CHECK(rep.n_trajectories == 50);
    for (std::size_t b = 0; b + 1 < rep.bin_edges.size(); ++b)
        CHECK(rep.occupancy_start[b] == rep.occupancy_end[b]);
}

TEST_CASE("stationarity run is seed-deterministic") {
    const KernelModel k = KernelModel::hermite(4, {-8.0, 8.0});
    const DiffusionConfig cfg = closed_cfg(1e-3, 0.05);
    const StationarityReport r1 = stationarity_run(k, cfg, 30, 11);
    const StationarityReport r2 = stationarity_run(k, cfg, 30, 11);
    CHECK(r1.max_abs_z == r2.max_abs_z);
    CHECK(r1.gap_distance == r2.gap_distance);
    REQUIRE(r1.z_scores.size() == r2.z_scores.size());
    for (std::size_t b = 0; b < r1.z_scores.size(); ++b)
        CHECK(r1.z_scores[b] == r2.z_scores[b]);
}
