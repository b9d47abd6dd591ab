#ifndef COOP_GENERATOR_HPP
#define COOP_GENERATOR_HPP

#include <cstdint>

#include "coop/model.hpp"

namespace coop {

struct IntRange {
    int lo = 0;
    int hi = 0;
};

/// Draw weights over the four body variants; need not be normalized.
struct BodyMix {
    double constant = 0.25;
    double piecewise = 0.25;
    double polynomial = 0.25;
    double sampled = 0.25;
};

struct GeneratorConfig {
    std::uint64_t seed = 42;
    IntRange n_range{1, 6};
    BodyMix body_mix{};
    double entry_scale = 2.0;
    bool cooperative = true;
    double boundary_fraction = 0.25;  // fraction of initial states on the orthant boundary
    IntRange pieces_range{2, 5};

    void validate() const;
};

/// Canonical window for generated systems. All-positive times so that
/// polynomial bodies with nonnegative coefficients stay entrywise nonnegative
/// across the whole window.
inline constexpr double kGeneratedWindowA = 0.0;
inline constexpr double kGeneratedWindowB = 1.5;
inline constexpr double kGeneratedT0 = 0.25;
inline constexpr double kGeneratedTEnd = 1.25;

/// Deterministic system draw; instance k reads stream 2k of cfg.seed.
/// Cooperative draws are Metzler by construction; non-cooperative draws force
/// one off-diagonal entry to a value in [-entry_scale, -0.1 * entry_scale]
/// (and dimension >= 2).
CoefficientMatrix gen_system(const GeneratorConfig& cfg, std::uint64_t instance = 0);

/// Deterministic initial-state draw; instance k reads stream 2k+1.
/// Boundary draws have at least one exact-zero coordinate, the rest in
/// (0, entry_scale]; interior draws lie in [0.1, entry_scale] coordinatewise.
Vector gen_initial(const GeneratorConfig& cfg, Index n, std::uint64_t instance = 0);

}  // namespace coop

#endif
