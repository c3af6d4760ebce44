#pragma once

#include <cmath>
#include <cstdint>

#include "dpp/errors.hpp"

namespace dpp {

// Monte Carlo estimate. stderr is 0 exactly when the value is deterministic.
struct Estimate {
    double value = 0.0;
    double std_err = 0.0;
    std::int64_t n = 0;

    double rel_stderr() const {
        return value == 0.0 ? (std_err == 0.0 ? 0.0 : HUGE_VAL) : std::abs(std_err / value);
    }
};

// Streaming central moments up to order four. The merge is associative, so
// per-worker accumulators combine into the same result regardless of how the
// samples were partitioned (up to roundoff).
class RunningStat {
public:
    void add(double x) { merge(RunningStat(x)); }

    void merge(const RunningStat& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double n = na + nb;
        const double d = o.mean_ - mean_;
        const double d2 = d * d;
        m4_ = m4_ + o.m4_ + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * o.m2_ + nb * nb * m2_) / (n * n)
            + 4.0 * d * (na * o.m3_ - nb * m3_) / n;
        m3_ = m3_ + o.m3_ + d * d2 * na * nb * (na - nb) / (n * n)
            + 3.0 * d * (na * o.m2_ - nb * m2_) / n;
        m2_ = m2_ + o.m2_ + d2 * na * nb / n;
        mean_ = mean_ + d * nb / n;
        n_ += o.n_;
    }

    std::int64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / (n_ - 1) : 0.0; }
    double stderr_of_mean() const { return n_ > 1 ? std::sqrt(variance() / n_) : 0.0; }
    double fourth_moment() const { return n_ > 0 ? m4_ / n_ : 0.0; }

    Estimate mean_estimate() const { return {mean_, stderr_of_mean(), n_}; }

    // Standard error of the sample variance via the fourth central moment:
    // Var(s^2) ~ (m4 - s^4 (n-3)/(n-1)) / n.
    Estimate variance_estimate() const {
        if (n_ < 2) return {variance(), 0.0, n_};
        const double s2 = variance();
        const double nn = static_cast<double>(n_);
        double v = (fourth_moment() - s2 * s2 * (nn - 3.0) / (nn - 1.0)) / nn;
        if (v < 0.0) v = 0.0;
        return {s2, std::sqrt(v), n_};
    }

private:
    explicit RunningStat(double x) : n_(1), mean_(x) {}

public:
    RunningStat() = default;

private:
    std::int64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
    double m3_ = 0.0;
    double m4_ = 0.0;
};

// Paired accumulator for self-normalized (ratio) estimators E[u]/E[v].
class PairedStat {
public:
    void add(double u, double v) {
        const double na = static_cast<double>(n_);
        const double n = na + 1.0;
        const double du = u - mean_u_, dv = v - mean_v_;
        c_uu_ += du * du * na / n;
        c_vv_ += dv * dv * na / n;
        c_uv_ += du * dv * na / n;
        mean_u_ += du / n;
        mean_v_ += dv / n;
        ++n_;
    }

    void merge(const PairedStat& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) { *this = o; return; }
        const double na = static_cast<double>(n_), nb = static_cast<double>(o.n_);
        const double n = na + nb;
        const double du = o.mean_u_ - mean_u_, dv = o.mean_v_ - mean_v_;
        c_uu_ += o.c_uu_ + du * du * na * nb / n;
        c_vv_ += o.c_vv_ + dv * dv * na * nb / n;
        c_uv_ += o.c_uv_ + du * dv * na * nb / n;
        mean_u_ += du * nb / n;
        mean_v_ += dv * nb / n;
        n_ += o.n_;
    }

    std::int64_t count() const { return n_; }
    double mean_u() const { return mean_u_; }
    double mean_v() const { return mean_v_; }

    // Delta-method standard error for mean_u / mean_v.
    Estimate ratio_estimate() const {
        if (n_ == 0 || mean_v_ == 0.0)
            throw DegenerateError("ratio_estimate: undefined ratio");
        const double r = mean_u_ / mean_v_;
        if (n_ < 2) return {r, 0.0, n_};
        const double nn = static_cast<double>(n_);
        const double suu = c_uu_ / (nn - 1.0), svv = c_vv_ / (nn - 1.0), suv = c_uv_ / (nn - 1.0);
        double var = (suu - 2.0 * r * suv + r * r * svv) / (mean_v_ * mean_v_) / nn;
        if (var < 0.0) var = 0.0;
        return {r, std::sqrt(var), n_};
    }

private:
    std::int64_t n_ = 0;
    double mean_u_ = 0.0, mean_v_ = 0.0;
    double c_uu_ = 0.0, c_uv_ = 0.0, c_vv_ = 0.0;
};

} // namespace dpp
