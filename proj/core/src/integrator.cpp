#include "coop/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace coop {

void StepperConfig::validate() const {
    if (max_steps < 1) {
        throw InvalidConfig("StepperConfig: max_steps must be positive");
    }
    if (const auto* rk4 = std::get_if<FixedRk4>(&method)) {
        if (!(std::isfinite(rk4->step) && rk4->step > 0.0)) {
            throw InvalidConfig("FixedRk4: step must be positive and finite");
        }
    } else {
        const auto& rk45 = std::get<EmbeddedRk45>(method);
        const double fields[] = {rk45.rel_tol, rk45.abs_tol, rk45.initial_step, rk45.min_step,
                                 rk45.max_step};
        for (double v : fields) {
            if (!(std::isfinite(v) && v > 0.0)) {
                throw InvalidConfig("EmbeddedRk45: tolerances and steps must be positive and finite");
            }
        }
        if (rk45.min_step > rk45.max_step) {
            throw InvalidConfig("EmbeddedRk45: min_step must not exceed max_step");
        }
    }
}

Trajectory::Trajectory(TrajectoryData data) : d_(std::move(data)) {
    const std::size_t m = d_.times.size();
    if (d_.states.size() != m || d_.trace_integrals.size() != m) {
        throw InvalidConfig("Trajectory: times/states/trace_integrals must have equal length");
    }
    for (std::size_t k = 1; k < m; ++k) {
        if (!(d_.times[k - 1] < d_.times[k])) {
            throw InvalidConfig("Trajectory: times must be strictly increasing");
        }
    }
    const bool with_derivs = !d_.derivs_left.empty();
    if (with_derivs &&
        (d_.derivs_left.size() != m || d_.derivs_right.size() != m ||
         d_.trace_derivs_left.size() != m || d_.trace_derivs_right.size() != m)) {
        throw InvalidConfig("Trajectory: derivative arrays must match times length");
    }
    if (!with_derivs &&
        (!d_.derivs_right.empty() || !d_.trace_derivs_left.empty() || !d_.trace_derivs_right.empty())) {
        throw InvalidConfig("Trajectory: derivative arrays must all be present or all empty");
    }
}

std::pair<Vector, double> Trajectory::sample_at(double t) const {
    if (empty()) {
        throw EmptyTrajectory("sample_at on empty trajectory");
    }
    const auto& ts = d_.times;
    if (t < ts.front() || t > ts.back()) {
        throw TimeOutOfRange("sample_at: t=" + std::to_string(t) + " outside [" +
                             std::to_string(ts.front()) + ", " + std::to_string(ts.back()) + "]");
    }
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it != ts.end() && *it == t) {
        const std::size_t k = static_cast<std::size_t>(it - ts.begin());
        return {d_.states[k], d_.trace_integrals[k]};
    }
    if (!has_dense_output()) {
        throw Error("sample_at: trajectory carries no derivative data for dense output");
    }
    const std::size_t k = static_cast<std::size_t>(it - ts.begin()) - 1;
    const double h = ts[k + 1] - ts[k];
    const double u = (t - ts[k]) / h;
    const double u2 = u * u;
    const double u3 = u2 * u;
    const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    // Left end uses the derivative leaving the node, right end the derivative
    // arriving at it, so each interval interpolates within its own smooth piece.
    Vector x = h00 * d_.states[k] + (h10 * h) * d_.derivs_right[k] + h01 * d_.states[k + 1] +
               (h11 * h) * d_.derivs_left[k + 1];
    double integral = h00 * d_.trace_integrals[k] + (h10 * h) * d_.trace_derivs_right[k] +
                      h01 * d_.trace_integrals[k + 1] + (h11 * h) * d_.trace_derivs_left[k + 1];
    return {std::move(x), integral};
}

namespace {

// Augmented right-hand side on one smooth segment: z = (x, I),
// z' = (A(t) x, trace A(t)).
class SegmentRhs {
public:
    SegmentRhs(const SmoothSegment& seg, Index n) : seg_(seg), n_(n) {}

    void operator()(double t, const Vector& z, Vector& dz) {
        seg_.eval_into(t, a_);
        dz.head(n_).noalias() = a_ * z.head(n_);
        dz(n_) = a_.trace();
    }

private:
    const SmoothSegment& seg_;
    Index n_;
    Matrix a_;
};

struct Recorder {
    TrajectoryData data;
    Index n = 0;

    void push_node(double t, const Vector& z, const Vector& dz) {
        data.times.push_back(t);
        data.states.push_back(z.head(n));
        data.trace_integrals.push_back(z(n));
        data.derivs_left.push_back(dz.head(n));
        data.derivs_right.push_back(dz.head(n));
        data.trace_derivs_left.push_back(dz(n));
        data.trace_derivs_right.push_back(dz(n));
    }

    // Called when a new segment recomputes the derivative at the node it
    // shares with the previous one.
    void reset_right_derivative(const Vector& dz) {
        data.derivs_right.back() = dz.head(n);
        data.trace_derivs_right.back() = dz(n);
    }
};

// Dormand-Prince 5(4) tableau.
constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
constexpr double kA21 = 1.0 / 5;
constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187, kA53 = 64448.0 / 6561,
                 kA54 = -212.0 / 729;
constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                 kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192, kB5 = -2187.0 / 6784,
                 kB6 = 11.0 / 84;
constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                 kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;

class Rk45Core {
public:
    Rk45Core(Index dim) {
        for (Vector* k : {&k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &ytmp_, &ynew_, &err_}) {
            k->resize(dim);
        }
    }

    // One trial step from (t, y) with k1 = f(t, y) already filled.
    // On return ynew_/k7_/err_ hold the candidate state, its derivative and
    // the embedded error vector.
    template <class F>
    void trial(F& f, double t, const Vector& y, double h) {
        ytmp_ = y + h * (kA21 * k1_);
        f(t + kC2 * h, ytmp_, k2_);
        ytmp_ = y + h * (kA31 * k1_ + kA32 * k2_);
        f(t + kC3 * h, ytmp_, k3_);
        ytmp_ = y + h * (kA41 * k1_ + kA42 * k2_ + kA43 * k3_);
        f(t + kC4 * h, ytmp_, k4_);
        ytmp_ = y + h * (kA51 * k1_ + kA52 * k2_ + kA53 * k3_ + kA54 * k4_);
        f(t + kC5 * h, ytmp_, k5_);
        ytmp_ = y + h * (kA61 * k1_ + kA62 * k2_ + kA63 * k3_ + kA64 * k4_ + kA65 * k5_);
        f(t + h, ytmp_, k6_);
        ynew_ = y + h * (kB1 * k1_ + kB3 * k3_ + kB4 * k4_ + kB5 * k5_ + kB6 * k6_);
        f(t + h, ynew_, k7_);  // FSAL
        err_ = h * (kE1 * k1_ + kE3 * k3_ + kE4 * k4_ + kE5 * k5_ + kE6 * k6_ + kE7 * k7_);
    }

    double error_norm(const Vector& y, double abs_tol, double rel_tol) const {
        double acc = 0.0;
        for (Index i = 0; i < y.size(); ++i) {
            const double sk = abs_tol + rel_tol * std::max(std::abs(y(i)), std::abs(ynew_(i)));
            const double q = err_(i) / sk;
            acc += q * q;
        }
        return std::sqrt(acc / static_cast<double>(y.size()));
    }

    Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_, ynew_, err_;
};

class Budget {
public:
    explicit Budget(std::int64_t max_steps) : remaining_(max_steps) {}
    void charge() {
        if (--remaining_ < 0) {
            throw StepLimitExceeded("integration exceeded max_steps");
        }
    }

private:
    std::int64_t remaining_;
};

void integrate_segment_rk45(SegmentRhs& f, const EmbeddedRk45& cfg, Budget& budget, double s0,
                            double s1, Vector& z, Recorder& rec) {
    const Index dim = z.size();
    Rk45Core core(dim);
    Vector dz(dim);
    f(s0, z, dz);
    if (rec.data.times.empty()) {
        rec.push_node(s0, z, dz);
    } else {
        rec.reset_right_derivative(dz);
    }
    core.k1_ = dz;

    double t = s0;
    double h = std::max(std::min({cfg.initial_step, cfg.max_step, s1 - s0}), cfg.min_step);
    while (t < s1) {
        bool last = false;
        if (t + 1.05 * h >= s1) {
            h = s1 - t;
            last = true;
        }
        budget.charge();
        core.trial(f, t, z, h);
        const double err = core.error_norm(z, cfg.abs_tol, cfg.rel_tol);
        const bool accept = std::isfinite(err) && err <= 1.0;
        double fac;
        if (!std::isfinite(err)) {
            fac = 0.2;
        } else {
            fac = 0.9 * std::pow(std::max(err, 1e-300), -0.2);
        }
        if (accept) {
            t = last ? s1 : t + h;
            z = core.ynew_;
            rec.push_node(t, z, core.k7_);
            core.k1_ = core.k7_;
            h = std::min({h * std::clamp(fac, 0.2, 5.0), cfg.max_step,
                          std::max(s1 - t, cfg.min_step)});
        } else {
            h = h * std::clamp(fac, 0.2, 1.0);
            if (h < cfg.min_step) {
                throw StepUnderflow("adaptive step " + std::to_string(h) + " fell below min_step " +
                                    std::to_string(cfg.min_step) + " at t=" + std::to_string(t));
            }
        }
    }
}

void integrate_segment_rk4(SegmentRhs& f, const FixedRk4& cfg, Budget& budget, double s0, double s1,
                           Vector& z, Recorder& rec) {
    const Index dim = z.size();
    Vector k1(dim), k2(dim), k3(dim), k4(dim), ytmp(dim), dz(dim);
    f(s0, z, dz);
    if (rec.data.times.empty()) {
        rec.push_node(s0, z, dz);
    } else {
        rec.reset_right_derivative(dz);
    }

    const double span = s1 - s0;
    const auto nfull = static_cast<std::int64_t>(std::floor(span / cfg.step + 1e-12));
    const double remainder = span - static_cast<double>(nfull) * cfg.step;
    const bool tail = remainder > 1e-12 * std::max(1.0, std::abs(s1));
    const std::int64_t nsteps = nfull + (tail ? 1 : 0);

    double t = s0;
    k1 = dz;
    for (std::int64_t i = 0; i < std::max<std::int64_t>(nsteps, 1); ++i) {
        budget.charge();
        const bool last = (i + 1 >= nsteps);
        const double tnew = last ? s1 : s0 + static_cast<double>(i + 1) * cfg.step;
        const double h = tnew - t;
        ytmp = z + (0.5 * h) * k1;
        f(t + 0.5 * h, ytmp, k2);
        ytmp = z + (0.5 * h) * k2;
        f(t + 0.5 * h, ytmp, k3);
        ytmp = z + h * k3;
        f(tnew, ytmp, k4);
        z += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t = tnew;
        f(t, z, k1);  // node derivative, reused as the next step's k1
        rec.push_node(t, z, k1);
    }
}

}  // namespace

Trajectory solve_ivp(const CoefficientMatrix& A, double t0, const Vector& x0, double t_end,
                     const StepperConfig& cfg) {
    cfg.validate();
    const Index n = A.dimension();
    if (x0.size() != n) {
        throw DimensionMismatch("solve_ivp: x0 has length " + std::to_string(x0.size()) +
                                ", system dimension is " + std::to_string(n));
    }
    if (!x0.allFinite()) {
        throw NonFiniteInput("solve_ivp: non-finite initial state");
    }
    if (!A.window().contains(t0) || !A.window().contains(t_end)) {
        throw TimeOutOfWindow("solve_ivp: [t0, t_end] must lie inside the open window");
    }
    if (t_end < t0) {
        throw PreconditionViolated("solve_ivp: backward integration (t_end < t0) is not supported");
    }

    Recorder rec;
    rec.n = n;
    Vector z(n + 1);
    z.head(n) = x0;
    z(n) = 0.0;

    if (t_end == t0) {
        // Zero-length solve: the initial sample only.
        auto segs = A.smooth_partition(t0, t0);
        SegmentRhs f(segs.front(), n);
        Vector dz(n + 1);
        f(t0, z, dz);
        rec.push_node(t0, z, dz);
        return Trajectory(std::move(rec.data));
    }

    Budget budget(cfg.max_steps);
    const auto segments = A.smooth_partition(t0, t_end);
    for (std::size_t s = 0; s < segments.size(); ++s) {
        const SmoothSegment& seg = segments[s];
        if (s > 0) {
            rec.data.restart_times.push_back(seg.begin());
        }
        SegmentRhs f(seg, n);
        if (const auto* rk4 = std::get_if<FixedRk4>(&cfg.method)) {
            integrate_segment_rk4(f, *rk4, budget, seg.begin(), seg.end(), z, rec);
        } else {
            integrate_segment_rk45(f, std::get<EmbeddedRk45>(cfg.method), budget, seg.begin(),
                                   seg.end(), z, rec);
        }
    }
    return Trajectory(std::move(rec.data));
}

Matrix fundamental_matrix(const CoefficientMatrix& A, double t0, double t_end,
                          const StepperConfig& cfg) {
    const Index n = A.dimension();
    Matrix phi(n, n);
    for (Index j = 0; j < n; ++j) {
        Vector e = Vector::Zero(n);
        e(j) = 1.0;
        phi.col(j) = solve_ivp(A, t0, e, t_end, cfg).states().back();
    }
    return phi;
}

}  // namespace coop
