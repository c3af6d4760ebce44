#pragma once

#include <cmath>

#include "dpp/errors.hpp"

namespace dpp {

// Closed interval [lo, hi] on which a kernel is evaluated and discretized.
struct Window {
    double lo = 0.0;
    double hi = 0.0;

    Window() = default;
    Window(double lo_, double hi_) : lo(lo_), hi(hi_) {
        if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi))
            throw PreconditionError("Window requires finite lo < hi");
    }

    double length() const { return hi - lo; }
    double half_width() const { return 0.5 * (hi - lo); }
    double center() const { return 0.5 * (lo + hi); }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

} // namespace dpp
