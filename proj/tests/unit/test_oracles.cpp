#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "coop/generator.hpp"
#include "coop/integrator.hpp"
#include "coop/oracles.hpp"
#include "coop/rng.hpp"
#include "test_support.hpp"

using namespace coop;
using namespace coop::testing;

namespace {

// Test-local reference: plain long-double Taylor summation at order 60,
// no scaling and squaring. A different algorithmic route than the library,
// accurate to ~1e-16 relative for sup-norms up to ~5.
Matrix expm_series_reference(const Matrix& m, int order = 60) {
    const Index n = m.rows();
    std::vector<long double> term(static_cast<std::size_t>(n * n), 0.0L);
    std::vector<long double> acc(static_cast<std::size_t>(n * n), 0.0L);
    for (Index i = 0; i < n; ++i) {
        term[static_cast<std::size_t>(i * n + i)] = 1.0L;
        acc[static_cast<std::size_t>(i * n + i)] = 1.0L;
    }
    std::vector<long double> next(static_cast<std::size_t>(n * n));
    for (int k = 1; k <= order; ++k) {
        for (Index i = 0; i < n; ++i) {
            for (Index j = 0; j < n; ++j) {
                long double s = 0.0L;
                for (Index l = 0; l < n; ++l) {
                    s += term[static_cast<std::size_t>(i * n + l)] *
                         static_cast<long double>(m(l, j));
                }
                next[static_cast<std::size_t>(i * n + j)] = s / k;
            }
        }
        term = next;
        for (std::size_t e = 0; e < acc.size(); ++e) {
            acc[e] += term[e];
        }
    }
    Matrix out(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            out(i, j) = static_cast<double>(acc[static_cast<std::size_t>(i * n + j)]);
        }
    }
    return out;
}

double sup_norm(const Matrix& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

Matrix random_matrix(Index n, double entry_cap, Xoshiro256StarStar& rng) {
    Matrix m(n, n);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < n; ++j) {
            m(i, j) = rng.uniform(-entry_cap, entry_cap);
        }
    }
    return m;
}

}  // namespace

TEST_CASE("expm fixed points") {
    CHECK((expm(Matrix::Zero(3, 3)) - Matrix::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);

    const Matrix nilpotent = expm(mat2(0, 1, 0, 0));
    CHECK(nilpotent(0, 0) == 1.0);
    CHECK(nilpotent(0, 1) == 1.0);
    CHECK(nilpotent(1, 0) == 0.0);
    CHECK(nilpotent(1, 1) == 1.0);

    const Matrix sym = expm(mat2(0, 1, 1, 0));
    CHECK(sym(0, 0) == doctest::Approx(kCosh1).epsilon(1e-14));
    CHECK(sym(0, 1) == doctest::Approx(kSinh1).epsilon(1e-14));
    CHECK(sym(1, 0) == doctest::Approx(kSinh1).epsilon(1e-14));
    CHECK(sym(1, 1) == doctest::Approx(kCosh1).epsilon(1e-14));

    Matrix bad = mat2(0, 1, 1, 0);
    bad(1, 1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(expm(bad), NonFiniteInput);
    CHECK_THROWS_AS(expm(Matrix::Zero(2, 3)), DimensionMismatch);
}

TEST_CASE("expm matches an independent series summation on random matrices") {
    Xoshiro256StarStar rng(600, 1);
    for (int trial = 0; trial < 25; ++trial) {
        const Index n = 1 + trial % 5;
        const Matrix m = random_matrix(n, 5.0 / static_cast<double>(n), rng);
        const Matrix got = expm(m);
        const Matrix want = expm_series_reference(m);
        CHECK(sup_norm(got - want) <= 1e-13 * std::max(1.0, sup_norm(want)));
    }
}

TEST_CASE("expm semigroup identity") {
    Xoshiro256StarStar rng(601, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 2 + trial % 4;
        const Matrix m = random_matrix(n, 5.0 / static_cast<double>(n), rng);
        const Matrix once = expm(m);
        const Matrix twice = expm(2.0 * m);
        CHECK(sup_norm(once * once - twice) <= 1e-10 * sup_norm(twice));
    }
}

TEST_CASE("expm agrees with the integrator's fundamental matrix") {
    Xoshiro256StarStar rng(602, 3);
    for (int trial = 0; trial < 15; ++trial) {
        const Index n = 2 + trial % 4;
        const Matrix m = random_matrix(n, 5.0 / static_cast<double>(n), rng);
        const auto A = constant_system(m, TimeWindow(-0.5, 1.5, 0.0));
        const Matrix phi = fundamental_matrix(A, 0.0, 1.0);
        const Matrix ref = expm(m);
        CHECK(sup_norm(phi - ref) <= 1e-8 * sup_norm(ref));
    }
}

TEST_CASE("metzler exponential sign check") {
    SUBCASE("Metzler matrices stay entrywise nonnegative at all probes") {
        const double probes[] = {0.1, 1.0, 10.0};
        const auto result = metzler_exponential_sign_check(mat2(-1, 2, 3, -4), probes);
        CHECK(result.nonnegative);
        CHECK_FALSE(result.witness.has_value());
    }
    SUBCASE("a negative off-diagonal entry surfaces at small t") {
        const double probes[] = {0.1};
        const auto result = metzler_exponential_sign_check(mat2(0, -2, 0, 0), probes);
        REQUIRE_FALSE(result.nonnegative);
        REQUIRE(result.witness.has_value());
        CHECK(result.witness->i == 0);
        CHECK(result.witness->j == 1);
        CHECK(result.witness->value == doctest::Approx(-0.2).epsilon(1e-12));
        CHECK(result.witness->t == 0.1);
    }
    SUBCASE("diagonal matrices pass regardless of sign") {
        const double probes[] = {0.5, 2.0};
        CHECK(metzler_exponential_sign_check(mat2(-50, 0, 0, 3), probes).nonnegative);
    }
    SUBCASE("probes must be positive and finite") {
        const double bad[] = {0.1, -1.0};
        CHECK_THROWS_AS(metzler_exponential_sign_check(mat2(0, 1, 1, 0), bad), NonFiniteInput);
    }
}

TEST_CASE("epsilon perturbation shifts off-diagonal entries only") {
    SUBCASE("constant") {
        const auto A = constant_system(Matrix::Zero(2, 2));
        const auto P = epsilon_perturb(A, 0.1);
        const Matrix got = std::get<ConstantBody>(P.body()).entries;
        CHECK(got(0, 0) == 0.0);
        CHECK(got(0, 1) == 0.1);
        CHECK(got(1, 0) == 0.1);
        CHECK(got(1, 1) == 0.0);
    }
    SUBCASE("negative identity with eps = 1") {
        const auto P = epsilon_perturb(constant_system(mat2(-1, 0, 0, -1)), 1.0);
        const Matrix got = std::get<ConstantBody>(P.body()).entries;
        CHECK(got(0, 0) == -1.0);
        CHECK(got(0, 1) == 1.0);
        CHECK(got(1, 0) == 1.0);
        CHECK(got(1, 1) == -1.0);
    }
    SUBCASE("piecewise pieces perturbed, breakpoints unchanged") {
        PiecewiseConstantBody body;
        body.breakpoints = {0.5};
        body.pieces = {mat2(-1, 0, 0.5, -1), mat2(-2, 0.25, 0, -2)};
        const CoefficientMatrix A(TimeWindow(0.0, 1.0, 0.25), std::move(body));
        const auto P = epsilon_perturb(A, 0.125);
        const auto& got = std::get<PiecewiseConstantBody>(P.body());
        CHECK(got.breakpoints == std::vector<double>{0.5});
        CHECK(got.pieces[0](1, 0) == 0.625);
        CHECK(got.pieces[0](0, 0) == -1.0);
        CHECK(got.pieces[1](0, 1) == 0.375);
    }
    SUBCASE("polynomial constant coefficient absorbs the shift") {
        PolynomialBody body;
        body.n = 2;
        body.coefficients = {{-1.0}, {}, {0.5, 1.0}, {-1.0}};
        const CoefficientMatrix A(TimeWindow(0.0, 1.0, 0.5), std::move(body));
        const auto P = epsilon_perturb(A, 0.25);
        const auto& got = std::get<PolynomialBody>(P.body());
        CHECK(got.poly(0, 1) == std::vector<double>{0.25});        // was the zero polynomial
        CHECK(got.poly(1, 0) == std::vector<double>{0.75, 1.0});   // constant term shifted
        CHECK(got.poly(0, 0) == std::vector<double>{-1.0});        // diagonal untouched
    }
    SUBCASE("grid nodes perturbed in place") {
        SampledGridBody body;
        body.grid = {0.0, 1.0};
        body.nodes = {Matrix::Zero(2, 2), mat2(0, 0.5, 0, 0)};
        const CoefficientMatrix A(TimeWindow(0.0, 1.0, 0.5), std::move(body));
        const auto P = epsilon_perturb(A, 0.5);
        const auto& got = std::get<SampledGridBody>(P.body());
        CHECK(got.nodes[0](0, 1) == 0.5);
        CHECK(got.nodes[1](0, 1) == 1.0);
    }
    SUBCASE("eps must be positive") {
        CHECK_THROWS_AS(epsilon_perturb(constant_system(Matrix::Zero(2, 2)), 0.0), InvalidConfig);
        CHECK_THROWS_AS(epsilon_perturb(constant_system(Matrix::Zero(2, 2)), -0.1), InvalidConfig);
    }
}

TEST_CASE("epsilon schedule validation") {
    CHECK_NOTHROW(EpsilonSchedule{}.validate());
    EpsilonSchedule bad;
    bad.values = {0.1, 0.1};
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
    bad.values = {0.01, 0.1};
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
    bad.values = {0.1, 0.0};
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
    bad.values = {};
    CHECK_THROWS_AS(bad.validate(), InvalidConfig);
}

TEST_CASE("continuous dependence probe against the closed form") {
    // For A = 0 and eps = 0.1 the perturbed flow is the cosh/sinh rotation of
    // (1, 0): the deviation is sinh(0.1) in the sup norm.
    const auto A = constant_system(Matrix::Zero(2, 2), TimeWindow(-0.5, 1.5, 0.0));
    EpsilonSchedule sched;
    sched.values = {0.1};
    const auto table = continuous_dependence_probe(A, vec({1, 0}), 0.0, 1.0, sched);
    REQUIRE(table.size() == 1);
    CHECK(table[0].eps == 0.1);
    CHECK(table[0].deviation == doctest::Approx(kSinh01).epsilon(1e-9));
}

TEST_CASE("probe deviations shrink first-order along the schedule") {
    GeneratorConfig cfg;
    cfg.seed = 808;
    cfg.boundary_fraction = 0.0;
    for (std::uint64_t k = 0; k < 10; ++k) {
        const CoefficientMatrix A = gen_system(cfg, k);
        if (A.dimension() < 2) continue;  // scalar systems see no perturbation
        const Vector x0 = gen_initial(cfg, A.dimension(), k);
        const auto table =
            continuous_dependence_probe(A, x0, kGeneratedT0, kGeneratedTEnd);
        for (std::size_t r = 1; r < table.size(); ++r) {
            CHECK(table[r].deviation <= table[r - 1].deviation + 1e-12);
        }
        // First-order dependence: a decade of eps drops the deviation by
        // roughly a decade once eps is small.
        const double ratio = table[3].deviation / table[2].deviation;
        CHECK(ratio >= 0.05);
        CHECK(ratio <= 0.2);
    }
}

TEST_CASE("perturbed cooperative flows dominate coordinatewise") {
    GeneratorConfig cfg;
    cfg.seed = 809;
    cfg.boundary_fraction = 0.5;
    StepperConfig fixed;
    fixed.method = FixedRk4{0.005};  // shared step grid for the comparison
    for (std::uint64_t k = 0; k < 10; ++k) {
        const CoefficientMatrix A = gen_system(cfg, k);
        const Vector x0 = gen_initial(cfg, A.dimension(), k);
        const auto base = solve_ivp(A, kGeneratedT0, x0, kGeneratedTEnd, fixed);
        const auto upper =
            solve_ivp(epsilon_perturb(A, 0.05), kGeneratedT0, x0, kGeneratedTEnd, fixed);
        REQUIRE(base.times() == upper.times());
        for (std::size_t s = 0; s < base.size(); ++s) {
            const Vector diff = upper.states()[s] - base.states()[s];
            const double scale = std::max(1.0, base.states()[s].cwiseAbs().maxCoeff());
            CHECK(diff.minCoeff() >= -1e-7 * scale);
        }
    }
}

TEST_CASE("probe deviation respects the Gronwall-style scale bound") {
    GeneratorConfig cfg;
    cfg.seed = 810;
    cfg.boundary_fraction = 0.0;
    for (std::uint64_t k = 0; k < 8; ++k) {
        const CoefficientMatrix A = gen_system(cfg, k);
        const Vector x0 = gen_initial(cfg, A.dimension(), k);
        const Index n = A.dimension();
        if (n < 2) continue;
        const double eps = 1e-4;
        EpsilonSchedule sched;
        sched.values = {eps};
        const auto table =
            continuous_dependence_probe(A, x0, kGeneratedT0, kGeneratedTEnd, sched);

        // || x_eps - x ||(T) <= eps (n-1) max||x|| (T - t0) e^{L (T - t0)}
        // with L an upper bound on the perturbed sup-norm, from variation of
        // constants and the usual exponential estimate.
        const auto base = solve_ivp(A, kGeneratedT0, x0, kGeneratedTEnd);
        double max_state = 0.0;
        for (const Vector& x : base.states()) {
            max_state = std::max(max_state, x.cwiseAbs().maxCoeff());
        }
        const auto perturbed = epsilon_perturb(A, eps);
        double big_l = 0.0;
        for (int probe = 0; probe <= 64; ++probe) {
            const double t =
                kGeneratedT0 + (kGeneratedTEnd - kGeneratedT0) * probe / 64.0;
            const double t_inside = std::min(std::max(t, kGeneratedT0 + 1e-9), kGeneratedTEnd);
            big_l = std::max(big_l,
                             perturbed.at(t_inside).cwiseAbs().rowwise().sum().maxCoeff());
        }
        const double span = kGeneratedTEnd - kGeneratedT0;
        const double bound =
            eps * static_cast<double>(n - 1) * max_state * span * std::exp(big_l * span) + 1e-12;
        CHECK(table[0].deviation <= bound);
    }
}
