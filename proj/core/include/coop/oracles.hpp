#ifndef COOP_ORACLES_HPP
#define COOP_ORACLES_HPP

#include <optional>
#include <span>
#include <vector>

#include "coop/integrator.hpp"
#include "coop/model.hpp"

namespace coop {

/// Matrix exponential by scaling-and-squaring: scale by 2^-s until the
/// sup-norm is <= 0.5, sum the Taylor series through term 20, square s times.
/// Deterministic; the truncation remainder at this threshold is far below
/// double roundoff.
Matrix expm(const Matrix& m);

struct SignCheckWitness {
    double t;
    Index i;
    Index j;
    double value;
};

struct SignCheckResult {
    bool nonnegative = false;
    std::optional<SignCheckWitness> witness;  // first negative entry found
};

/// Checks that expm(t * M) is entrywise >= -abs_tol at every probe instant.
/// For Metzler M this holds for all t >= 0; small probes expose the converse
/// through e^{tM} ~ I + tM.
SignCheckResult metzler_exponential_sign_check(const Matrix& m, std::span<const double> probes,
                                               const ToleranceProfile& tol = {});

/// A_eps: every off-diagonal entry shifted up by eps, diagonal untouched,
/// body variant preserved. The strongly cooperative approximation.
CoefficientMatrix epsilon_perturb(const CoefficientMatrix& A, double eps);

struct EpsilonSchedule {
    std::vector<double> values = {1e-1, 1e-2, 1e-3, 1e-4};

    void validate() const;
};

struct DependenceRow {
    double eps;
    double deviation;  // sup-norm distance of x_eps(t_end) from x(t_end)
};

/// Solves the IVP once per schedule entry with the eps-perturbed system and
/// tabulates the final-state deviation from the unperturbed solve.
std::vector<DependenceRow> continuous_dependence_probe(const CoefficientMatrix& A, const Vector& x0,
                                                       double t0, double t_end,
                                                       const EpsilonSchedule& schedule = {},
                                                       const StepperConfig& cfg = {});

}  // namespace coop

#endif
