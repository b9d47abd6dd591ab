#ifndef COOP_INTEGRATOR_HPP
#define COOP_INTEGRATOR_HPP

#include <cstdint>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "coop/model.hpp"

namespace coop {

struct FixedRk4 {
    double step = 1e-2;
};

/// Dormand-Prince 5(4) with standard PI-free step control.
struct EmbeddedRk45 {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 1e-2;
    double min_step = 1e-12;
    double max_step = 10.0;
};

struct StepperConfig {
    std::variant<FixedRk4, EmbeddedRk45> method = EmbeddedRk45{};
    std::int64_t max_steps = 1'000'000;

    void validate() const;
};

/// Raw sample arrays for assembling a Trajectory outside of solve_ivp
/// (hand-built series, reloaded CSV). Derivative arrays may be left empty,
/// in which case dense output is unavailable.
struct TrajectoryData {
    std::vector<double> times;
    std::vector<Vector> states;
    std::vector<double> trace_integrals;
    std::vector<Vector> derivs_left;        // d/dt x at node, limit from the left interval
    std::vector<Vector> derivs_right;       // limit from the right interval
    std::vector<double> trace_derivs_left;  // trace A at node, one-sided as above
    std::vector<double> trace_derivs_right;
    std::vector<double> restart_times;      // interior instants where the stepper restarted
};

/// Time-ordered samples of one IVP solve: states x(t_k) plus the running
/// integral I_k of trace A, carried as an extra quadrature coordinate by the
/// same stepper. Immutable after construction.
class Trajectory {
public:
    /// Dense-output rule between accepted steps.
    static constexpr std::string_view interpolation_rule = "cubic-hermite";

    Trajectory() = default;  // empty trajectory
    explicit Trajectory(TrajectoryData data);

    bool empty() const { return d_.times.empty(); }
    std::size_t size() const { return d_.times.size(); }
    Index dimension() const { return d_.states.empty() ? 0 : d_.states.front().size(); }

    const std::vector<double>& times() const { return d_.times; }
    const std::vector<Vector>& states() const { return d_.states; }
    const std::vector<double>& trace_integrals() const { return d_.trace_integrals; }
    const std::vector<double>& restart_times() const { return d_.restart_times; }

    bool has_dense_output() const { return !d_.derivs_left.empty(); }
    bool has_trace_derivatives() const { return !d_.trace_derivs_right.empty(); }
    double trace_derivative(std::size_t k) const { return d_.trace_derivs_right[k]; }

    /// Cubic-Hermite interpolation of (x, I) between bracketing accepted
    /// steps; exact at stored nodes. Throws TimeOutOfRange outside
    /// [times.front(), times.back()], EmptyTrajectory when empty.
    std::pair<Vector, double> sample_at(double t) const;

private:
    TrajectoryData d_;
};

/// Solves x' = A(t) x, x(t0) = x0 forward to t_end. The integration state is
/// augmented with I' = trace A(t) so the trace integral shares the step
/// sequence. Piecewise-constant breakpoints and sampled-grid nodes inside
/// (t0, t_end) are hit exactly and the stepper restarts there.
/// t_end == t0 yields the single-sample trajectory.
Trajectory solve_ivp(const CoefficientMatrix& A, double t0, const Vector& x0, double t_end,
                     const StepperConfig& cfg = {});

/// Phi(t_end, t0): column j is the solution at t_end started from e_j.
Matrix fundamental_matrix(const CoefficientMatrix& A, double t0, double t_end,
                          const StepperConfig& cfg = {});

}  // namespace coop

#endif
