#ifndef COOP_TOLERANCE_HPP
#define COOP_TOLERANCE_HPP

#include <cmath>

#include "coop/errors.hpp"

namespace coop {

/// Floating-point slacks used when judging the exact inequalities of the
/// theory. All fields must be nonnegative and finite.
struct ToleranceProfile {
    double abs_tol = 1e-9;       // absolute slack for nonnegativity
    double strict_tol = 1e-12;   // threshold for strict positivity
    double rel_cert_tol = 1e-6;  // relative slack for certificate comparisons
    double metzler_tol = 0.0;    // slack for the off-diagonal sign check

    void validate() const {
        const double fields[] = {abs_tol, strict_tol, rel_cert_tol, metzler_tol};
        for (double v : fields) {
            if (!(std::isfinite(v) && v >= 0.0)) {
                throw InvalidConfig("ToleranceProfile fields must be finite and nonnegative");
            }
        }
    }
};

}  // namespace coop

#endif
