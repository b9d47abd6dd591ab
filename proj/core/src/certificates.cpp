#include "coop/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace coop {

namespace {

void require_nonempty(const Trajectory& traj, const char* op) {
    if (traj.empty()) {
        throw EmptyTrajectory(std::string(op) + " on empty trajectory");
    }
}

double margin_floor(const ToleranceProfile& tol) {
    // Keeps the relative margin finite when the bound underflows.
    return std::max(tol.abs_tol, 1e-300);
}

bool all_positive(const Vector& x) {
    for (Index i = 0; i < x.size(); ++i) {
        if (!(x(i) > 0.0)) return false;
    }
    return true;
}

double log_product(const Vector& x) {
    double acc = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        acc += std::log(x(i));
    }
    return acc;
}

// True if the stencil (t_prev, t_next) straddles a stepper restart, where
// the right-hand side has one-sided derivatives only.
bool stencil_hits_restart(const std::vector<double>& restarts, double t_prev, double t_next) {
    auto it = std::upper_bound(restarts.begin(), restarts.end(), t_prev);
    return it != restarts.end() && *it < t_next;
}

}  // namespace

double CertificateReport::min_margin() const {
    double mn = std::numeric_limits<double>::infinity();
    for (double m : margin) mn = std::min(mn, m);
    return mn;
}

ProductSeries product_series(const Trajectory& traj) {
    require_nonempty(traj, "product_series");
    ProductSeries out;
    out.times = traj.times();
    out.xi.reserve(traj.size());
    for (const Vector& x : traj.states()) {
        double p = 1.0;
        for (Index i = 0; i < x.size(); ++i) {
            p *= x(i);
        }
        out.xi.push_back(p);
    }
    return out;
}

BoundSeries trace_bound_series(const Trajectory& traj) {
    require_nonempty(traj, "trace_bound_series");
    BoundSeries out;
    out.times = traj.times();
    out.bound.reserve(traj.size());
    double xi0 = 1.0;
    const Vector& x0 = traj.states().front();
    for (Index i = 0; i < x0.size(); ++i) {
        xi0 *= x0(i);
    }
    for (double integral : traj.trace_integrals()) {
        out.bound.push_back(xi0 * std::exp(integral));
    }
    return out;
}

CertificateReport check_certificate(const Trajectory& traj, const ToleranceProfile& tol) {
    require_nonempty(traj, "check_certificate");

    auto xi = product_series(traj);
    auto bound = trace_bound_series(traj);
    const std::size_t m = xi.times.size();

    CertificateReport report;
    report.times = std::move(xi.times);
    report.xi = std::move(xi.xi);
    report.bound = std::move(bound.bound);
    report.margin.resize(m);
    const double floor = margin_floor(tol);
    for (std::size_t k = 0; k < m; ++k) {
        report.margin[k] =
            (report.xi[k] - report.bound[k]) / std::max(std::abs(report.bound[k]), floor);
    }

    if (classify_orthant(traj.states().front(), tol).tag != OrthantTag::Interior) {
        report.verdict = CertVerdict::NotApplicable;
        return report;
    }

    const double log_xi0 = log_product(traj.states().front());
    const double log_slack = tol.rel_cert_tol + tol.abs_tol;
    constexpr double kUnderflowGuard = 1e-290;

    std::optional<std::size_t> first_integrated_bad;

    // Integrated form: xi >= bound * (1 - rel) - abs at every sample.
    for (std::size_t k = 0; k < m && !first_integrated_bad; ++k) {
        const double xik = report.xi[k];
        const double bk = report.bound[k];
        const bool linear_ok =
            std::isfinite(xik) && std::isfinite(bk) && xik >= bk * (1.0 - tol.rel_cert_tol) - tol.abs_tol;
        if (linear_ok) continue;
        // Out at the extremes of double range the product/exponential lose
        // meaning before the inequality does; compare in the log domain,
        // which is valid while every coordinate is positive.
        const Vector& x = traj.states()[k];
        const bool extreme = !std::isfinite(xik) || !std::isfinite(bk) ||
                             std::min(std::abs(xik), std::abs(bk)) < kUnderflowGuard;
        if (extreme && all_positive(x)) {
            const double lhs = log_product(x);
            const double rhs = log_xi0 + traj.trace_integrals()[k];
            if (lhs >= rhs - log_slack) continue;
        }
        first_integrated_bad = k;
    }

    // Differential form: centered differences of xi against trace A * xi on
    // smooth stretches. Skipped at stencils spanning a stepper restart and
    // when the trajectory carries no trace derivatives.
    std::optional<std::size_t> first_differential_bad;
    if (traj.has_trace_derivatives() && m >= 3) {
        const auto& ts = report.times;
        for (std::size_t k = 1; k + 1 < m && !first_differential_bad; ++k) {
            if (stencil_hits_restart(traj.restart_times(), ts[k - 1], ts[k + 1])) continue;
            const double h0 = ts[k] - ts[k - 1];
            const double h1 = ts[k + 1] - ts[k];
            const double fd = -report.xi[k - 1] * h1 / (h0 * (h0 + h1)) +
                              report.xi[k] * (h1 - h0) / (h0 * h1) +
                              report.xi[k + 1] * h0 / (h1 * (h0 + h1));
            const double rhs = traj.trace_derivative(k) * report.xi[k];
            if (!std::isfinite(fd) || !std::isfinite(rhs)) continue;  // handled in log domain above
            // The centered-difference error carries xi''' ~ rate^3 * xi, so the
            // O(h^2) slack must scale with the cube of the local growth rate
            // (|trace| alone underestimates it as soon as |trace| > sqrt(60)).
            const double h = std::max(h0, h1);
            const double xi_scale = std::max(std::abs(report.xi[k]), 1e-300);
            const double rate = std::max(std::abs(traj.trace_derivative(k)), std::abs(fd) / xi_scale);
            const double rate1 = 1.0 + rate;
            const double slack = (10.0 / 6.0) * h * h * rate1 * rate1 * rate1 * xi_scale;
            if (fd < rhs - slack) {
                first_differential_bad = k;
            }
        }
    }

    // Earliest failing sample across both forms.
    std::optional<std::size_t> first_bad = first_integrated_bad;
    if (first_differential_bad && (!first_bad || *first_differential_bad < *first_bad)) {
        first_bad = first_differential_bad;
    }

    if (first_bad) {
        report.verdict = CertVerdict::ViolationFound;
        report.first_violation_time = report.times[*first_bad];
    } else {
        report.verdict = CertVerdict::CertifiedPositive;
    }
    return report;
}

MonotonicityVerdict check_m1(const Trajectory& traj, const ToleranceProfile& tol) {
    require_nonempty(traj, "check_m1");
    if (classify_orthant(traj.states().front(), tol).tag == OrthantTag::Outside) {
        throw PreconditionViolated("check_m1: initial state outside the nonnegative orthant");
    }
    MonotonicityVerdict v{MonotoneProperty::M1, true, traj.times().front(), 0,
                          std::numeric_limits<double>::infinity()};
    for (std::size_t k = 0; k < traj.size(); ++k) {
        const Vector& x = traj.states()[k];
        Index argmin = 0;
        const double mn = x.minCoeff(&argmin);
        if (mn < v.worst_value) {
            v.worst_value = mn;
            v.worst_time = traj.times()[k];
            v.worst_coordinate = argmin;
        }
    }
    v.holds = v.worst_value >= -tol.abs_tol;
    return v;
}

MonotonicityVerdict check_m2(const Trajectory& traj, const ToleranceProfile& tol) {
    require_nonempty(traj, "check_m2");
    if (classify_orthant(traj.states().front(), tol).tag != OrthantTag::Interior) {
        throw PreconditionViolated("check_m2: initial state not strictly interior");
    }
    MonotonicityVerdict v{MonotoneProperty::M2, true, traj.times().front(), 0,
                          std::numeric_limits<double>::infinity()};
    if (traj.size() == 1) {
        // Zero-length solve: nothing after t0 to check.
        Index argmin = 0;
        v.worst_value = traj.states().front().minCoeff(&argmin);
        v.worst_coordinate = argmin;
        return v;
    }
    for (std::size_t k = 1; k < traj.size(); ++k) {
        const Vector& x = traj.states()[k];
        Index argmin = 0;
        const double mn = x.minCoeff(&argmin);
        if (mn < v.worst_value) {
            v.worst_value = mn;
            v.worst_time = traj.times()[k];
            v.worst_coordinate = argmin;
        }
    }
    v.holds = v.worst_value > tol.strict_tol;
    return v;
}

ConsistencySummary implies_check(const CoefficientMatrix& A, std::span<const RunRecord> records,
                                 const SamplingPlan& plan, const ToleranceProfile& tol) {
    const std::uint64_t fp = A.fingerprint();
    for (std::size_t k = 0; k < records.size(); ++k) {
        if (records[k].system_fingerprint != fp) {
            throw MixedSystems("implies_check: record " + std::to_string(k) +
                               " was generated from a different system");
        }
    }
    const bool cooperative = is_cooperative(A, plan, tol).cooperative;

    ConsistencySummary summary;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const RunRecord& r = records[k];
        const std::string tag = "record " + std::to_string(k);
        if (cooperative) {
            if (r.certificate && *r.certificate == CertVerdict::ViolationFound) {
                summary.contradictions.push_back(tag +
                                                 ": cooperative system with certificate violation");
            }
            if (r.m1 && !r.m1->holds) {
                summary.contradictions.push_back(tag + ": cooperative system failed M1");
            }
            if (r.m2 && !r.m2->holds) {
                summary.contradictions.push_back(tag + ": cooperative system failed M2");
            }
        } else {
            const bool some_pass = (r.m1 && r.m1->holds) || (r.m2 && r.m2->holds) ||
                                   (r.certificate && *r.certificate == CertVerdict::CertifiedPositive);
            if (some_pass) {
                summary.notes.push_back(
                    tag + ": non-cooperative system passed checks (allowed; non-cooperativity does "
                          "not force violation for every initial state)");
            }
        }
    }
    return summary;
}

}  // namespace coop
