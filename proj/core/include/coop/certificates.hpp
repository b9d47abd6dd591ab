#ifndef COOP_CERTIFICATES_HPP
#define COOP_CERTIFICATES_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "coop/integrator.hpp"
#include "coop/model.hpp"

namespace coop {

enum class CertVerdict { CertifiedPositive, ViolationFound, NotApplicable };

/// The product-of-coordinates certificate along one trajectory:
/// xi(t_k) = prod_i x_i(t_k) against its trace-exponential lower bound
/// xi(t_0) * exp(I_k).
struct CertificateReport {
    std::vector<double> times;
    std::vector<double> xi;
    std::vector<double> bound;
    std::vector<double> margin;  // (xi - bound) / max(|bound|, floor)
    CertVerdict verdict = CertVerdict::NotApplicable;
    std::optional<double> first_violation_time;  // earliest failing sample

    double min_margin() const;
};

enum class MonotoneProperty { M1, M2 };

struct MonotonicityVerdict {
    MonotoneProperty property;
    bool holds;
    double worst_time;
    Index worst_coordinate;
    double worst_value;
};

struct ProductSeries {
    std::vector<double> times;
    std::vector<double> xi;
};

struct BoundSeries {
    std::vector<double> times;
    std::vector<double> bound;
};

/// xi[k] = product of the coordinates of states[k], left to right.
ProductSeries product_series(const Trajectory& traj);

/// bound[k] = xi[0] * exp(trace_integrals[k]).
BoundSeries trace_bound_series(const Trajectory& traj);

/// Verifies xi(t) >= xi(t0) * exp(I(t)) at every sample (within tolerances)
/// and, where the trajectory is smooth, that the centered-difference slope of
/// xi stays above trace A * xi minus an O(h^2) slack. Interior initial states
/// only; anything else yields NotApplicable.
CertificateReport check_certificate(const Trajectory& traj, const ToleranceProfile& tol = {});

/// Nonnegative-orthant invariance: every sampled coordinate >= -abs_tol.
/// Requires x0 in the closed orthant (throws PreconditionViolated otherwise).
MonotonicityVerdict check_m1(const Trajectory& traj, const ToleranceProfile& tol = {});

/// Open-orthant invariance: every sampled coordinate > strict_tol for t > t0.
/// Requires x0 strictly interior (throws PreconditionViolated otherwise).
MonotonicityVerdict check_m2(const Trajectory& traj, const ToleranceProfile& tol = {});

/// One verification run distilled for batch cross-checking.
struct RunRecord {
    std::uint64_t system_fingerprint = 0;
    std::optional<CertVerdict> certificate;
    std::optional<MonotonicityVerdict> m1;
    std::optional<MonotonicityVerdict> m2;
};

struct ConsistencySummary {
    std::vector<std::string> contradictions;
    std::vector<std::string> notes;
    bool consistent() const { return contradictions.empty(); }
};

/// Cross-checks a batch of reports against the system's cooperativity: a
/// cooperative system with any violation verdict is a contradiction (toolkit
/// bug or tolerance misconfiguration). Non-cooperative systems passing checks
/// are merely noted. Throws MixedSystems if a record's fingerprint differs.
ConsistencySummary implies_check(const CoefficientMatrix& A, std::span<const RunRecord> records,
                                 const SamplingPlan& plan = {}, const ToleranceProfile& tol = {});

}  // namespace coop

#endif
