#pragma once

#include <cstddef>
#include <vector>

#include "dpp/defaults.hpp"
#include "dpp/kernel.hpp"

namespace dpp {

// Kernel conditioned on particles at the anchor points:
//   Pi^a(x,y) = Pi(x,y) - Pi(x,a) Pi(a,y) / Pi(a,a),
// applied once per anchor. The rank-one updates are evaluated lazily; nothing
// is tabulated, so anchors may be placed anywhere in the window. The diagonal
// vanishes to second order at each anchor.
class PalmKernel {
public:
    explicit PalmKernel(KernelModel base) : base_(std::move(base)) {}

    const KernelModel& base() const { return base_; }
    const std::vector<double>& anchors() const { return anchors_; }
    const Window& window() const { return base_.window(); }

    double eval(double x, double y) const {
        base_.check_domain(x);
        base_.check_domain(y);
        return eval_level(anchors_.size(), x, y);
    }

    double intensity(double x) const { return eval(x, x); }

    // Appends an anchor unless the current intensity there is already zero
    // (below the intensity floor), in which case conditioning is a no-op.
    friend PalmKernel palm_reduce(PalmKernel pk, double a) {
        pk.base_.check_domain(a);
        const double denom = pk.eval_level(pk.anchors_.size(), a, a);
        if (!(denom > defaults::intensity_floor)) return pk;
        pk.anchors_.push_back(a);
        pk.denoms_.push_back(denom);
        return pk;
    }

private:
    double eval_level(std::size_t m, double x, double y) const {
        if (m == 0) return base_.rep().eval(x, y);
        const double am = anchors_[m - 1];
        const double v = eval_level(m - 1, x, y);
        return v - eval_level(m - 1, x, am) * eval_level(m - 1, am, y) / denoms_[m - 1];
    }

    KernelModel base_;
    std::vector<double> anchors_;
    std::vector<double> denoms_;
};

inline PalmKernel palm_reduce(const KernelModel& k, double a) {
    return palm_reduce(PalmKernel(k), a);
}

template <PointKernel K>
double palm_intensity(const K& k, double x) {
    return k.intensity(x);
}

} // namespace dpp
