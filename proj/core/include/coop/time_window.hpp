#ifndef COOP_TIME_WINDOW_HPP
#define COOP_TIME_WINDOW_HPP

#include <cmath>
#include <string>

#include "coop/errors.hpp"

namespace coop {

/// Open time interval (a, b) together with the initial instant t0.
/// Invariant: a < t0 < b, all finite.
class TimeWindow {
public:
    TimeWindow(double a, double b, double t0) : a_(a), b_(b), t0_(t0) {
        if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(t0))) {
            throw InvalidConfig("TimeWindow endpoints must be finite");
        }
        if (!(a < t0 && t0 < b)) {
            throw InvalidConfig("TimeWindow requires a < t0 < b, got a=" + std::to_string(a) +
                                " t0=" + std::to_string(t0) + " b=" + std::to_string(b));
        }
    }

    double a() const { return a_; }
    double b() const { return b_; }
    double t0() const { return t0_; }

    /// True iff t lies strictly inside (a, b).
    bool contains(double t) const { return t > a_ && t < b_; }

private:
    double a_;
    double b_;
    double t0_;
};

}  // namespace coop

#endif
