#include "coop/oracles.hpp"

#include <cmath>
#include <string>

namespace coop {

namespace {

double sup_norm(const Matrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

constexpr int kTaylorOrder = 20;
constexpr double kScalingThreshold = 0.5;

void shift_offdiagonal(Matrix& m, double eps) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (i != j) m(i, j) += eps;
        }
    }
}

}  // namespace

Matrix expm(const Matrix& m) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("expm: matrix must be square");
    }
    if (!m.allFinite()) {
        throw NonFiniteInput("expm: non-finite entry");
    }
    const Index n = m.rows();
    int s = 0;
    double norm = sup_norm(m);
    while (norm > kScalingThreshold) {
        norm *= 0.5;
        ++s;
    }
    const Matrix a = m / std::pow(2.0, s);
    Matrix term = Matrix::Identity(n, n);
    Matrix result = Matrix::Identity(n, n);
    for (int k = 1; k <= kTaylorOrder; ++k) {
        term = (term * a) / static_cast<double>(k);
        result += term;
    }
    for (int k = 0; k < s; ++k) {
        result = result * result;
    }
    return result;
}

SignCheckResult metzler_exponential_sign_check(const Matrix& m, std::span<const double> probes,
                                               const ToleranceProfile& tol) {
    for (double t : probes) {
        if (!(std::isfinite(t) && t > 0.0)) {
            throw NonFiniteInput("metzler_exponential_sign_check: probes must be positive and finite");
        }
    }
    for (double t : probes) {
        const Matrix e = expm(t * m);
        for (Index i = 0; i < e.rows(); ++i) {
            for (Index j = 0; j < e.cols(); ++j) {
                if (e(i, j) < -tol.abs_tol) {
                    return {false, SignCheckWitness{t, i, j, e(i, j)}};
                }
            }
        }
    }
    return {true, std::nullopt};
}

CoefficientMatrix epsilon_perturb(const CoefficientMatrix& A, double eps) {
    if (!(std::isfinite(eps) && eps > 0.0)) {
        throw InvalidConfig("epsilon_perturb: eps must be positive and finite");
    }
    MatrixBody body = A.body();
    std::visit(
        [&](auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                shift_offdiagonal(b.entries, eps);
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                for (Matrix& p : b.pieces) shift_offdiagonal(p, eps);
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                for (Index i = 0; i < b.n; ++i) {
                    for (Index j = 0; j < b.n; ++j) {
                        if (i == j) continue;
                        auto& coeffs = b.coefficients[static_cast<std::size_t>(i * b.n + j)];
                        if (coeffs.empty()) {
                            coeffs.push_back(eps);
                        } else {
                            coeffs[0] += eps;
                        }
                    }
                }
            } else {
                for (Matrix& node : b.nodes) shift_offdiagonal(node, eps);
            }
        },
        body);
    return CoefficientMatrix(A.window(), std::move(body));
}

void EpsilonSchedule::validate() const {
    if (values.empty()) {
        throw InvalidConfig("EpsilonSchedule: empty");
    }
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (!(std::isfinite(values[k]) && values[k] > 0.0)) {
            throw InvalidConfig("EpsilonSchedule: values must be positive and finite");
        }
        if (k > 0 && !(values[k] < values[k - 1])) {
            throw InvalidConfig("EpsilonSchedule: values must be strictly decreasing");
        }
    }
}

std::vector<DependenceRow> continuous_dependence_probe(const CoefficientMatrix& A, const Vector& x0,
                                                       double t0, double t_end,
                                                       const EpsilonSchedule& schedule,
                                                       const StepperConfig& cfg) {
    schedule.validate();
    const Vector base = solve_ivp(A, t0, x0, t_end, cfg).states().back();
    std::vector<DependenceRow> table;
    table.reserve(schedule.values.size());
    for (double eps : schedule.values) {
        const CoefficientMatrix perturbed = epsilon_perturb(A, eps);
        const Vector end = solve_ivp(perturbed, t0, x0, t_end, cfg).states().back();
        table.push_back({eps, (end - base).cwiseAbs().maxCoeff()});
    }
    return table;
}

}  // namespace coop
