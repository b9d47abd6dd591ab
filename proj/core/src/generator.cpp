#include "coop/generator.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "coop/rng.hpp"

namespace coop {

void GeneratorConfig::validate() const {
    if (n_range.lo < 1 || n_range.lo > n_range.hi) {
        throw InvalidConfig("GeneratorConfig: n_range must satisfy 1 <= lo <= hi");
    }
    const double weights[] = {body_mix.constant, body_mix.piecewise, body_mix.polynomial,
                              body_mix.sampled};
    double total = 0.0;
    for (double w : weights) {
        if (!(std::isfinite(w) && w >= 0.0)) {
            throw InvalidConfig("GeneratorConfig: body weights must be finite and nonnegative");
        }
        total += w;
    }
    if (!(total > 0.0)) {
        throw InvalidConfig("GeneratorConfig: body weights must not all be zero");
    }
    if (!(std::isfinite(entry_scale) && entry_scale > 0.0)) {
        throw InvalidConfig("GeneratorConfig: entry_scale must be positive and finite");
    }
    if (!(boundary_fraction >= 0.0 && boundary_fraction <= 1.0)) {
        throw InvalidConfig("GeneratorConfig: boundary_fraction must lie in [0, 1]");
    }
    if (pieces_range.lo < 1 || pieces_range.lo > pieces_range.hi) {
        throw InvalidConfig("GeneratorConfig: pieces_range must satisfy 1 <= lo <= hi");
    }
}

namespace {

enum class BodyKind { Constant, Piecewise, Polynomial, Sampled };

BodyKind pick_body(const BodyMix& mix, Xoshiro256StarStar& rng) {
    const double total = mix.constant + mix.piecewise + mix.polynomial + mix.sampled;
    const double u = rng.next_double() * total;
    if (u < mix.constant) return BodyKind::Constant;
    if (u < mix.constant + mix.piecewise) return BodyKind::Piecewise;
    if (u < mix.constant + mix.piecewise + mix.polynomial) return BodyKind::Polynomial;
    return BodyKind::Sampled;
}

Matrix draw_metzler(Index n, double scale, bool cooperative_offdiag, Xoshiro256StarStar& rng) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            if (i == j) {
                m(i, j) = rng.uniform(-scale, scale);
            } else {
                m(i, j) = cooperative_offdiag ? rng.uniform(0.0, scale) : rng.uniform(-scale, scale);
            }
        }
    }
    return m;
}

std::vector<double> draw_breakpoints(int pieces, Xoshiro256StarStar& rng) {
    // Breakpoints live inside the integrated span so that every generated
    // piece is actually exercised by a default solve.
    const double lo = kGeneratedT0 + 0.05;
    const double hi = kGeneratedTEnd - 0.05;
    std::vector<double> bps(static_cast<std::size_t>(pieces - 1));
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (double& bp : bps) {
            bp = rng.uniform(lo, hi);
        }
        std::sort(bps.begin(), bps.end());
        bool ok = true;
        for (std::size_t k = 1; k < bps.size(); ++k) {
            if (!(bps[k] - bps[k - 1] > 1e-9)) ok = false;
        }
        if (ok) return bps;
    }
    throw InvalidConfig("gen_system: could not draw distinct breakpoints");
}

// Degree-d coefficient scale chosen so |entry(t)| <= entry_scale across the
// window; same bound as the constant bodies.
double coeff_scale(double entry_scale, int degree_count, int q) {
    return entry_scale / (degree_count * std::pow(kGeneratedWindowB, q));
}

PolynomialBody draw_polynomial(Index n, double scale, bool cooperative, Xoshiro256StarStar& rng) {
    PolynomialBody body;
    body.n = n;
    body.coefficients.resize(static_cast<std::size_t>(n * n));
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            const int degree = rng.uniform_int(0, 3);
            std::vector<double> coeffs(static_cast<std::size_t>(degree) + 1);
            for (int q = 0; q <= degree; ++q) {
                const double s = coeff_scale(scale, degree + 1, q);
                if (i == j) {
                    coeffs[static_cast<std::size_t>(q)] = rng.uniform(-s, s);
                } else {
                    // Nonnegative coefficients keep off-diagonal entries
                    // nonnegative on the all-positive window.
                    coeffs[static_cast<std::size_t>(q)] =
                        cooperative ? rng.uniform(0.0, s) : rng.uniform(-s, s);
                }
            }
            body.coefficients[static_cast<std::size_t>(i * n + j)] = std::move(coeffs);
        }
    }
    return body;
}

void force_negative_offdiagonal(MatrixBody& body, Index n, double scale, Xoshiro256StarStar& rng) {
    const Index i = rng.uniform_int(0, static_cast<int>(n) - 1);
    Index j = rng.uniform_int(0, static_cast<int>(n) - 2);
    if (j >= i) ++j;
    const double value = -scale * (0.1 + 0.9 * rng.next_double());
    std::visit(
        [&](auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, ConstantBody>) {
                b.entries(i, j) = value;
            } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                for (Matrix& p : b.pieces) p(i, j) = value;
            } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                b.coefficients[static_cast<std::size_t>(i * n + j)] = {value};
            } else {
                for (Matrix& node : b.nodes) node(i, j) = value;
            }
        },
        body);
}

}  // namespace

CoefficientMatrix gen_system(const GeneratorConfig& cfg, std::uint64_t instance) {
    cfg.validate();
    Xoshiro256StarStar rng(cfg.seed, 2 * instance);

    int n = rng.uniform_int(cfg.n_range.lo, cfg.n_range.hi);
    if (!cfg.cooperative && n < 2) {
        n = 2;  // a non-cooperative draw needs an off-diagonal entry
    }
    const Index dim = n;
    const double scale = cfg.entry_scale;
    const TimeWindow window(kGeneratedWindowA, kGeneratedWindowB, kGeneratedT0);

    MatrixBody body;
    switch (pick_body(cfg.body_mix, rng)) {
        case BodyKind::Constant:
            body = ConstantBody{draw_metzler(dim, scale, cfg.cooperative, rng)};
            break;
        case BodyKind::Piecewise: {
            const int pieces = rng.uniform_int(cfg.pieces_range.lo, cfg.pieces_range.hi);
            PiecewiseConstantBody b;
            b.breakpoints = pieces > 1 ? draw_breakpoints(pieces, rng) : std::vector<double>{};
            b.pieces.reserve(static_cast<std::size_t>(pieces));
            for (int p = 0; p < pieces; ++p) {
                b.pieces.push_back(draw_metzler(dim, scale, cfg.cooperative, rng));
            }
            body = std::move(b);
            break;
        }
        case BodyKind::Polynomial:
            body = draw_polynomial(dim, scale, cfg.cooperative, rng);
            break;
        case BodyKind::Sampled: {
            const int nodes = rng.uniform_int(3, 8);
            SampledGridBody b;
            b.grid.resize(static_cast<std::size_t>(nodes));
            for (int k = 0; k < nodes; ++k) {
                b.grid[static_cast<std::size_t>(k)] =
                    kGeneratedWindowA +
                    (kGeneratedWindowB - kGeneratedWindowA) * static_cast<double>(k) / (nodes - 1);
            }
            b.nodes.reserve(static_cast<std::size_t>(nodes));
            for (int k = 0; k < nodes; ++k) {
                b.nodes.push_back(draw_metzler(dim, scale, cfg.cooperative, rng));
            }
            body = std::move(b);
            break;
        }
    }

    if (!cfg.cooperative) {
        force_negative_offdiagonal(body, dim, scale, rng);
    }
    return CoefficientMatrix(window, std::move(body));
}

Vector gen_initial(const GeneratorConfig& cfg, Index n, std::uint64_t instance) {
    cfg.validate();
    if (n < 1) {
        throw InvalidConfig("gen_initial: dimension must be positive");
    }
    Xoshiro256StarStar rng(cfg.seed, 2 * instance + 1);

    Vector x(n);
    const bool boundary = rng.next_double() < cfg.boundary_fraction;
    if (boundary) {
        const Index zero_at = rng.uniform_int(0, static_cast<int>(n) - 1);
        for (Index i = 0; i < n; ++i) {
            x(i) = (i == zero_at) ? 0.0 : cfg.entry_scale * rng.next_double_positive();
        }
    } else {
        for (Index i = 0; i < n; ++i) {
            x(i) = rng.uniform(0.1, cfg.entry_scale);
        }
    }
    return x;
}

}  // namespace coop
