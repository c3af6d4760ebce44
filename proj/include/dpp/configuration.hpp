#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dpp/errors.hpp"

namespace dpp {

// Finite point configuration, strictly increasing.
struct Configuration {
    std::vector<double> points;

    static Configuration from_points(std::vector<double> pts) {
        std::sort(pts.begin(), pts.end());
        for (std::size_t i = 0; i + 1 < pts.size(); ++i)
            if (!(pts[i] < pts[i + 1]))
                throw PreconditionError("Configuration: points must be distinct");
        for (double p : pts)
            if (!std::isfinite(p)) throw PreconditionError("Configuration: non-finite point");
        return Configuration{std::move(pts)};
    }

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }
    bool contains(double x) const {
        return std::binary_search(points.begin(), points.end(), x);
    }
};

// Number of points in the half-open interval [lo, hi).
inline int count_in(const Configuration& c, double lo, double hi) {
    if (!(lo <= hi)) throw PreconditionError("count_in: lo must be <= hi");
    const auto a = std::lower_bound(c.points.begin(), c.points.end(), lo);
    const auto b = std::lower_bound(c.points.begin(), c.points.end(), hi);
    return static_cast<int>(b - a);
}

// Anchor paired with a configuration drawn from the Palm measure at the
// anchor; the anchor itself is not part of the configuration.
struct CampbellSample {
    double anchor = 0.0;
    Configuration config;
};

} // namespace dpp
