#ifndef COOP_MODEL_HPP
#define COOP_MODEL_HPP

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "coop/errors.hpp"
#include "coop/time_window.hpp"
#include "coop/tolerance.hpp"

namespace coop {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// ---------------------------------------------------------------------------
// Matrix bodies: the four supported representations of t -> A(t).
// ---------------------------------------------------------------------------

struct ConstantBody {
    Matrix entries;
};

/// Left-closed pieces: piece k applies on [breakpoints[k-1], breakpoints[k]),
/// with the first piece starting at the window's left endpoint.
struct PiecewiseConstantBody {
    std::vector<double> breakpoints;  // strictly increasing, inside (a, b)
    std::vector<Matrix> pieces;       // breakpoints.size() + 1 matrices
};

/// Per-entry real polynomials in t, coefficients lowest degree first.
/// An empty coefficient list is the zero polynomial.
struct PolynomialBody {
    Index n = 0;
    std::vector<std::vector<double>> coefficients;  // row-major, n*n lists

    const std::vector<double>& poly(Index i, Index j) const {
        return coefficients[static_cast<std::size_t>(i * n + j)];
    }
};

/// Values on a strictly increasing grid, linear interpolation between nodes.
/// The grid must cover [a, b] so evaluation never extrapolates.
struct SampledGridBody {
    std::vector<double> grid;
    std::vector<Matrix> nodes;
};

using MatrixBody = std::variant<ConstantBody, PiecewiseConstantBody, PolynomialBody, SampledGridBody>;

class CoefficientMatrix;

/// One maximal interval on which the coefficient matrix is smooth.
/// Evaluation is valid on the closed interval [begin, end]; at a body
/// breakpoint this yields the one-sided limit from inside the segment.
class SmoothSegment {
public:
    double begin() const { return begin_; }
    double end() const { return end_; }

    void eval_into(double t, Matrix& out) const;
    Matrix eval(double t) const;
    double trace(double t) const;

private:
    friend class CoefficientMatrix;
    SmoothSegment(const CoefficientMatrix* owner, std::size_t piece, double begin, double end)
        : owner_(owner), piece_(piece), begin_(begin), end_(end) {}

    const CoefficientMatrix* owner_;
    std::size_t piece_;  // piece / grid-cell index; 0 for single-piece bodies
    double begin_;
    double end_;
};

// ---------------------------------------------------------------------------
// CoefficientMatrix: t -> A(t) on an open window, evaluable pointwise.
// Immutable after construction; all evaluation is pure.
// ---------------------------------------------------------------------------

class CoefficientMatrix {
public:
    CoefficientMatrix(TimeWindow window, MatrixBody body);

    Index dimension() const { return n_; }
    const TimeWindow& window() const { return window_; }
    const MatrixBody& body() const { return body_; }

    /// A(t) for t strictly inside (a, b). Throws TimeOutOfWindow otherwise.
    Matrix at(double t) const;
    void at_into(double t, Matrix& out) const;

    /// Sum of the diagonal of at(t); same arithmetic path as at().
    double trace_at(double t) const;

    /// Splits [from, to] at the body's interior breakpoints (piecewise pieces,
    /// grid nodes). Polynomial and constant bodies yield a single segment.
    std::vector<SmoothSegment> smooth_partition(double from, double to) const;

    /// FNV-1a hash of the canonical byte serialization; equal representations
    /// hash equal. Used to tie batch reports back to their system.
    std::uint64_t fingerprint() const;

private:
    friend class SmoothSegment;
    void eval_piece_into(std::size_t piece, double t, Matrix& out) const;

    Index n_;
    TimeWindow window_;
    MatrixBody body_;
};

// ---------------------------------------------------------------------------
// Orthant classification.
// ---------------------------------------------------------------------------

enum class OrthantTag { Interior, BoundaryNonnegative, Outside };

struct OrthantStatus {
    OrthantTag tag;
    /// Coordinate certifying Boundary or Outside status (the argmin);
    /// absent for Interior.
    std::optional<Index> witness_index;
};

/// Interior if min x_i > strict_tol, Outside if min x_i < -abs_tol,
/// BoundaryNonnegative otherwise. Throws NonFiniteInput on NaN/inf.
OrthantStatus classify_orthant(const Vector& x, const ToleranceProfile& tol = {});

// ---------------------------------------------------------------------------
// Cooperativity (Metzler) check.
// ---------------------------------------------------------------------------

struct MetzlerViolation {
    double t;
    Index i;
    Index j;
    double value;
};

/// Probe density for bodies that need sampling (polynomial entries).
/// Constant, piecewise and grid bodies are checked exactly regardless.
struct SamplingPlan {
    int density = 256;
};

struct CooperativityReport {
    bool cooperative = false;
    std::vector<MetzlerViolation> violations;
};

/// True iff a_ij(t) >= -metzler_tol for all i != j at every checked instant.
CooperativityReport is_cooperative(const CoefficientMatrix& A, const SamplingPlan& plan = {},
                                   const ToleranceProfile& tol = {});

}  // namespace coop

#endif
