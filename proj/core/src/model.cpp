#include "coop/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

namespace coop {

namespace {

bool all_finite(const Matrix& m) { return m.allFinite(); }

void require_square(const Matrix& m, Index n, const char* what) {
    if (m.rows() != n || m.cols() != n) {
        throw InvalidConfig(std::string(what) + ": expected " + std::to_string(n) + "x" +
                            std::to_string(n) + " matrix, got " + std::to_string(m.rows()) + "x" +
                            std::to_string(m.cols()));
    }
    if (!all_finite(m)) {
        throw InvalidConfig(std::string(what) + ": non-finite entry");
    }
}

bool strictly_increasing(const std::vector<double>& v) {
    for (std::size_t k = 1; k < v.size(); ++k) {
        if (!(v[k - 1] < v[k])) return false;
    }
    return true;
}

Index infer_dimension(const MatrixBody& body) {
    return std::visit(
        [](const auto& b) -> Index {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                return b.entries.rows();
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                return b.pieces.empty() ? 0 : b.pieces.front().rows();
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                return b.n;
            } else {
                return b.nodes.empty() ? 0 : b.nodes.front().rows();
            }
        },
        body);
}

double eval_poly(const std::vector<double>& coeffs, double t) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
        acc = acc * t + *it;
    }
    return acc;
}

// FNV-1a, 64-bit.
struct Fnv1a {
    std::uint64_t h = 14695981039346656037ull;
    void feed(const void* data, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t k = 0; k < len; ++k) {
            h ^= p[k];
            h *= 1099511628211ull;
        }
    }
    void feed_u64(std::uint64_t v) { feed(&v, sizeof v); }
    void feed_double(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof bits);
        feed_u64(bits);
    }
    void feed_matrix(const Matrix& m) {
        for (Index i = 0; i < m.rows(); ++i) {
            for (Index j = 0; j < m.cols(); ++j) {
                feed_double(m(i, j));
            }
        }
    }
};

}  // namespace

CoefficientMatrix::CoefficientMatrix(TimeWindow window, MatrixBody body)
    : n_(infer_dimension(body)), window_(window), body_(std::move(body)) {
    if (n_ < 1) {
        throw InvalidConfig("CoefficientMatrix: dimension must be positive");
    }
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                require_square(b.entries, n_, "constant body");
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                if (b.pieces.size() != b.breakpoints.size() + 1) {
                    throw InvalidConfig("piecewise body: need breakpoints.size()+1 pieces");
                }
                if (!strictly_increasing(b.breakpoints)) {
                    throw InvalidConfig("piecewise body: breakpoints must be strictly increasing");
                }
                for (double bp : b.breakpoints) {
                    if (!window_.contains(bp)) {
                        throw InvalidConfig("piecewise body: breakpoint " + std::to_string(bp) +
                                            " outside the open window");
                    }
                }
                for (const Matrix& p : b.pieces) require_square(p, n_, "piecewise piece");
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                if (b.coefficients.size() != static_cast<std::size_t>(n_ * n_)) {
                    throw InvalidConfig("polynomial body: need n*n coefficient lists");
                }
                for (const auto& c : b.coefficients) {
                    for (double v : c) {
                        if (!std::isfinite(v)) {
                            throw InvalidConfig("polynomial body: non-finite coefficient");
                        }
                    }
                }
            } else {
                if (b.grid.size() != b.nodes.size() || b.grid.size() < 2) {
                    throw InvalidConfig("sampled grid body: need matching grid/nodes, at least 2");
                }
                if (!strictly_increasing(b.grid)) {
                    throw InvalidConfig("sampled grid body: grid must be strictly increasing");
                }
                if (!(b.grid.front() <= window_.a() && b.grid.back() >= window_.b())) {
                    throw InvalidConfig("sampled grid body: grid must cover [a, b]");
                }
                for (const Matrix& m : b.nodes) require_square(m, n_, "grid node");
            }
        },
        body_);
}

void CoefficientMatrix::eval_piece_into(std::size_t piece, double t, Matrix& out) const {
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                out = b.entries;
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                out = b.pieces[piece];
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                out.resize(n_, n_);
                for (Index i = 0; i < n_; ++i) {
                    for (Index j = 0; j < n_; ++j) {
                        out(i, j) = eval_poly(b.poly(i, j), t);
                    }
                }
            } else {
                // Linear interpolation on grid cell [grid[piece], grid[piece+1]].
                const double g0 = b.grid[piece];
                const double g1 = b.grid[piece + 1];
                const double w = (t - g0) / (g1 - g0);
                out = (1.0 - w) * b.nodes[piece] + w * b.nodes[piece + 1];
            }
        },
        body_);
}

void CoefficientMatrix::at_into(double t, Matrix& out) const {
    if (!window_.contains(t)) {
        throw TimeOutOfWindow("t=" + std::to_string(t) + " outside open window (" +
                              std::to_string(window_.a()) + ", " + std::to_string(window_.b()) + ")");
    }
    std::size_t piece = 0;
    if (const auto* pw = std::get_if<PiecewiseConstantBody>(&body_)) {
        // Left-closed pieces: index = number of breakpoints <= t.
        piece = static_cast<std::size_t>(
            std::upper_bound(pw->breakpoints.begin(), pw->breakpoints.end(), t) -
            pw->breakpoints.begin());
    } else if (const auto* sg = std::get_if<SampledGridBody>(&body_)) {
        auto it = std::upper_bound(sg->grid.begin(), sg->grid.end(), t);
        std::size_t cell = static_cast<std::size_t>(it - sg->grid.begin());
        piece = (cell == 0) ? 0 : std::min(cell - 1, sg->grid.size() - 2);
    }
    eval_piece_into(piece, t, out);
}

Matrix CoefficientMatrix::at(double t) const {
    Matrix out;
    at_into(t, out);
    return out;
}

double CoefficientMatrix::trace_at(double t) const { return at(t).trace(); }

std::vector<SmoothSegment> CoefficientMatrix::smooth_partition(double from, double to) const {
    if (!(from <= to)) {
        throw PreconditionViolated("smooth_partition: from > to");
    }
    std::vector<SmoothSegment> out;
    const auto push = [&](std::size_t piece, double s0, double s1) {
        out.push_back(SmoothSegment(this, piece, s0, s1));
    };

    if (const auto* pw = std::get_if<PiecewiseConstantBody>(&body_)) {
        double cursor = from;
        for (std::size_t k = 0; k < pw->breakpoints.size(); ++k) {
            const double bp = pw->breakpoints[k];
            if (bp <= from || bp >= to) continue;
            push(static_cast<std::size_t>(
                     std::upper_bound(pw->breakpoints.begin(), pw->breakpoints.end(), cursor) -
                     pw->breakpoints.begin()),
                 cursor, bp);
            cursor = bp;
        }
        push(static_cast<std::size_t>(
                 std::upper_bound(pw->breakpoints.begin(), pw->breakpoints.end(), cursor) -
                 pw->breakpoints.begin()),
             cursor, to);
    } else if (const auto* sg = std::get_if<SampledGridBody>(&body_)) {
        double cursor = from;
        for (std::size_t k = 1; k + 1 < sg->grid.size(); ++k) {
            const double node = sg->grid[k];
            if (node <= from || node >= to) continue;
            auto it = std::upper_bound(sg->grid.begin(), sg->grid.end(), cursor);
            std::size_t cell = static_cast<std::size_t>(it - sg->grid.begin());
            cell = (cell == 0) ? 0 : std::min(cell - 1, sg->grid.size() - 2);
            push(cell, cursor, node);
            cursor = node;
        }
        auto it = std::upper_bound(sg->grid.begin(), sg->grid.end(), cursor);
        std::size_t cell = static_cast<std::size_t>(it - sg->grid.begin());
        cell = (cell == 0) ? 0 : std::min(cell - 1, sg->grid.size() - 2);
        push(cell, cursor, to);
    } else {
        push(0, from, to);
    }
    return out;
}

std::uint64_t CoefficientMatrix::fingerprint() const {
    Fnv1a fnv;
    fnv.feed_u64(static_cast<std::uint64_t>(body_.index()));
    fnv.feed_u64(static_cast<std::uint64_t>(n_));
    fnv.feed_double(window_.a());
    fnv.feed_double(window_.b());
    fnv.feed_double(window_.t0());
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                fnv.feed_matrix(b.entries);
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                for (double bp : b.breakpoints) fnv.feed_double(bp);
                for (const Matrix& p : b.pieces) fnv.feed_matrix(p);
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                for (const auto& c : b.coefficients) {
                    fnv.feed_u64(c.size());
                    for (double v : c) fnv.feed_double(v);
                }
            } else {
                for (double g : b.grid) fnv.feed_double(g);
                for (const Matrix& m : b.nodes) fnv.feed_matrix(m);
            }
        },
        body_);
    return fnv.h;
}

void SmoothSegment::eval_into(double t, Matrix& out) const {
    owner_->eval_piece_into(piece_, t, out);
}

Matrix SmoothSegment::eval(double t) const {
    Matrix out;
    eval_into(t, out);
    return out;
}

double SmoothSegment::trace(double t) const { return eval(t).trace(); }

OrthantStatus classify_orthant(const Vector& x, const ToleranceProfile& tol) {
    if (x.size() == 0) {
        throw InvalidConfig("classify_orthant: empty vector");
    }
    if (!x.allFinite()) {
        throw NonFiniteInput("classify_orthant: non-finite coordinate");
    }
    Index argmin = 0;
    const double mn = x.minCoeff(&argmin);
    if (mn > tol.strict_tol) {
        return {OrthantTag::Interior, std::nullopt};
    }
    if (mn < -tol.abs_tol) {
        return {OrthantTag::Outside, argmin};
    }
    return {OrthantTag::BoundaryNonnegative, argmin};
}

namespace {

void scan_offdiagonal(const Matrix& m, double t, double slack, std::vector<MetzlerViolation>& out) {
    for (Index i = 0; i < m.rows(); ++i) {
        for (Index j = 0; j < m.cols(); ++j) {
            if (i == j) continue;
            if (m(i, j) < -slack) {
                out.push_back({t, i, j, m(i, j)});
            }
        }
    }
}

}  // namespace

CooperativityReport is_cooperative(const CoefficientMatrix& A, const SamplingPlan& plan,
                                   const ToleranceProfile& tol) {
    if (plan.density < 1) {
        throw InvalidConfig("SamplingPlan density must be >= 1");
    }
    CooperativityReport report;
    const double a = A.window().a();
    const double b = A.window().b();
    const auto segments = A.smooth_partition(a, b);
    Matrix m;

    if (std::holds_alternative<PolynomialBody>(A.body())) {
        // Dense sampling across the window, closed endpoints included;
        // polynomial entries extend continuously to the closure so this
        // never extrapolates. Exactness is limited by the probe density.
        const SmoothSegment& seg = segments.front();
        for (int k = 0; k <= plan.density; ++k) {
            const double t = a + (b - a) * static_cast<double>(k) / plan.density;
            seg.eval_into(t, m);
            scan_offdiagonal(m, t, tol.metzler_tol, report.violations);
        }
    } else if (std::holds_alternative<SampledGridBody>(A.body())) {
        // Linear interpolation: the sign between nodes is bounded by the
        // values at the segment endpoints, so endpoint checks are exact.
        for (const SmoothSegment& seg : segments) {
            seg.eval_into(seg.begin(), m);
            scan_offdiagonal(m, seg.begin(), tol.metzler_tol, report.violations);
        }
        segments.back().eval_into(b, m);
        scan_offdiagonal(m, b, tol.metzler_tol, report.violations);
    } else {
        // Constant per segment: one representative instant each.
        for (const SmoothSegment& seg : segments) {
            const double t = 0.5 * (seg.begin() + seg.end());
            seg.eval_into(t, m);
            scan_offdiagonal(m, t, tol.metzler_tol, report.violations);
        }
    }

    report.cooperative = report.violations.empty();
    return report;
}

}  // namespace coop
