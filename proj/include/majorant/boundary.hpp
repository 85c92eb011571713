#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "majorant/hyperbolic.hpp"

namespace majorant {

/// Atom of a boundary measure: angle theta (disk) or abscissa t (half-plane).
struct PointMass {
    double position;
    double mass;
};

/// Nonnegative step function on the boundary. On the disk the breakpoints
/// are sorted in [0, 2pi) and piece i lives on [bp[i], bp[i+1]) with the last
/// piece wrapping around; values.size() == breakpoints.size(). On the line
/// the pieces are [bp[i], bp[i+1]) and values.size() == breakpoints.size()-1.
struct BoundaryDensity {
    Domain domain = Domain::disk;
    std::vector<double> breakpoints;
    Eigen::ArrayXd values;

    bool empty() const { return values.size() == 0; }

    double value_at(double x) const;
    double integral() const;
};

inline double BoundaryDensity::value_at(double x) const {
    if (empty()) return 0.0;
    if (domain == Domain::disk) {
        x = std::fmod(x, kTwoPi);
        if (x < 0) x += kTwoPi;
        // last piece wraps: [bp.back(), bp.front() + 2pi)
        auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
        long idx = static_cast<long>(it - breakpoints.begin()) - 1;
        if (idx < 0) idx = static_cast<long>(breakpoints.size()) - 1;
        return values[idx];
    }
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    long idx = static_cast<long>(it - breakpoints.begin()) - 1;
    if (idx < 0 || idx + 1 >= static_cast<long>(breakpoints.size())) return 0.0;
    return values[idx];
}

inline double BoundaryDensity::integral() const {
    if (empty()) return 0.0;
    double total = 0.0;
    if (domain == Domain::disk) {
        size_t n = breakpoints.size();
        for (size_t i = 0; i < n; ++i) {
            double lo = breakpoints[i];
            double hi = (i + 1 < n) ? breakpoints[i + 1] : breakpoints[0] + kTwoPi;
            total += values[i] * (hi - lo);
        }
    } else {
        for (size_t i = 0; i + 1 < breakpoints.size(); ++i)
            total += values[i] * (breakpoints[i + 1] - breakpoints[i]);
    }
    return total;
}

}  // namespace majorant
