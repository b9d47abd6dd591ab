#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "coop/generator.hpp"
#include "coop/model.hpp"
#include "coop/rng.hpp"
#include "test_support.hpp"

using namespace coop;
using namespace coop::testing;

TEST_CASE("TimeWindow enforces a < t0 < b, all finite") {
    CHECK_NOTHROW(TimeWindow(0.0, 2.0, 1.0));
    CHECK_THROWS_AS(TimeWindow(1.0, 2.0, 1.0), InvalidConfig);   // t0 == a
    CHECK_THROWS_AS(TimeWindow(0.0, 1.0, 1.0), InvalidConfig);   // t0 == b
    CHECK_THROWS_AS(TimeWindow(2.0, 1.0, 1.5), InvalidConfig);   // a > b
    CHECK_THROWS_AS(TimeWindow(0.0, std::numeric_limits<double>::infinity(), 1.0), InvalidConfig);
    CHECK_THROWS_AS(TimeWindow(std::nan(""), 2.0, 1.0), InvalidConfig);
}

TEST_CASE("constant body ignores t") {
    const auto A = constant_system(mat2(0, 1, 1, 0));
    const Matrix got = A.at(7.3);
    CHECK(got(0, 0) == 0.0);
    CHECK(got(0, 1) == 1.0);
    CHECK(got(1, 0) == 1.0);
    CHECK(got(1, 1) == 0.0);
}

TEST_CASE("piecewise lookup is left-closed at breakpoints") {
    PiecewiseConstantBody body;
    body.breakpoints = {1.0};
    body.pieces = {mat2(-1, 0, 0, -1), mat2(-2, 0, 0, -2)};
    const CoefficientMatrix A(TimeWindow(0.0, 2.0, 0.5), std::move(body));

    CHECK(A.at(1.5)(0, 0) == -2.0);
    CHECK(A.at(0.5)(0, 0) == -1.0);
    CHECK(A.at(1.0)(0, 0) == -2.0);  // second piece owns [1, 2)
}

TEST_CASE("polynomial entries evaluate by Horner") {
    PolynomialBody body;
    body.n = 2;
    body.coefficients = {{0.0, 0.0, 1.0}, {}, {}, {}};  // a11(t) = t^2, rest zero
    const CoefficientMatrix A(TimeWindow(0.0, 3.0, 1.0), std::move(body));

    const Matrix got = A.at(2.0);
    CHECK(got(0, 0) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(got(0, 1) == 0.0);
    CHECK(got(1, 0) == 0.0);
    CHECK(got(1, 1) == 0.0);
}

TEST_CASE("sampled grid interpolates linearly and must cover the window") {
    SampledGridBody body;
    body.grid = {0.0, 1.0, 2.0};
    body.nodes = {mat2(1, 0, 0, 1), mat2(2, 0, 0, 2), mat2(3, 0, 0, 3)};
    const CoefficientMatrix A(TimeWindow(0.0, 2.0, 1.0), body);
    CHECK(A.at(0.5)(0, 0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(A.at(1.75)(1, 1) == doctest::Approx(2.75).epsilon(1e-15));

    SampledGridBody short_grid;
    short_grid.grid = {0.5, 2.0};
    short_grid.nodes = {mat2(1, 0, 0, 1), mat2(2, 0, 0, 2)};
    CHECK_THROWS_AS(CoefficientMatrix(TimeWindow(0.0, 2.0, 1.0), short_grid), InvalidConfig);
}

TEST_CASE("evaluation outside the open window throws") {
    const auto A = constant_system(mat2(0, 0, 0, 0), TimeWindow(0.0, 2.0, 1.0));
    CHECK_THROWS_AS(A.at(0.0), TimeOutOfWindow);  // endpoints excluded
    CHECK_THROWS_AS(A.at(2.0), TimeOutOfWindow);
    CHECK_THROWS_AS(A.at(-3.0), TimeOutOfWindow);
    CHECK_NOTHROW(A.at(1.999));
}

TEST_CASE("construction rejects malformed bodies") {
    CHECK_THROWS_AS(constant_system(Matrix::Zero(2, 3)), InvalidConfig);

    PiecewiseConstantBody bad_bps;
    bad_bps.breakpoints = {1.0, 1.0};
    bad_bps.pieces = {mat2(0, 0, 0, 0), mat2(0, 0, 0, 0), mat2(0, 0, 0, 0)};
    CHECK_THROWS_AS(CoefficientMatrix(TimeWindow(0.0, 2.0, 0.5), bad_bps), InvalidConfig);

    PiecewiseConstantBody outside;
    outside.breakpoints = {5.0};
    outside.pieces = {mat2(0, 0, 0, 0), mat2(0, 0, 0, 0)};
    CHECK_THROWS_AS(CoefficientMatrix(TimeWindow(0.0, 2.0, 0.5), outside), InvalidConfig);

    Matrix nonfinite = mat2(0, 1, 1, 0);
    nonfinite(0, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(constant_system(nonfinite), InvalidConfig);
}

TEST_CASE("is_cooperative constrains off-diagonal entries only") {
    CHECK(is_cooperative(constant_system(mat2(-3, 0, 0, -5))).cooperative);
    CHECK(is_cooperative(constant_system(mat2(1, 2, 0.5, -1))).cooperative);

    const auto report = is_cooperative(constant_system(mat2(0, -2, 0, 0)));
    REQUIRE_FALSE(report.cooperative);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].i == 0);
    CHECK(report.violations[0].j == 1);
    CHECK(report.violations[0].value == -2.0);
}

TEST_CASE("is_cooperative checks every piecewise piece") {
    PiecewiseConstantBody body;
    body.breakpoints = {1.0};
    body.pieces = {mat2(-1, 0.5, 0.5, -1), mat2(-1, -0.25, 0.5, -1)};
    const CoefficientMatrix A(TimeWindow(0.0, 2.0, 0.5), std::move(body));

    const auto report = is_cooperative(A);
    REQUIRE_FALSE(report.cooperative);
    REQUIRE(report.violations.size() == 1);
    CHECK(report.violations[0].t > 1.0);  // the violation lives in the second piece
    CHECK(report.violations[0].value == -0.25);
}

TEST_CASE("polynomial cooperativity is judged by dense sampling") {
    PolynomialBody body;
    body.n = 2;
    body.coefficients = {{}, {-0.5, 1.0}, {}, {}};  // a12(t) = t - 0.5, negative near 0
    const CoefficientMatrix A(TimeWindow(0.0, 1.0, 0.5), body);

    CHECK_FALSE(is_cooperative(A).cooperative);
    // An explicit slack forgives the dip.
    ToleranceProfile loose;
    loose.metzler_tol = 0.6;
    CHECK(is_cooperative(A, {}, loose).cooperative);
}

TEST_CASE("sampled-grid cooperativity is exact at nodes") {
    SampledGridBody body;
    body.grid = {0.0, 1.0, 2.0};
    body.nodes = {mat2(0, 1, 1, 0), mat2(0, -0.5, 1, 0), mat2(0, 1, 1, 0)};
    const CoefficientMatrix A(TimeWindow(0.0, 2.0, 0.5), std::move(body));

    const auto report = is_cooperative(A);
    REQUIRE_FALSE(report.cooperative);
    CHECK(report.violations.front().t == 1.0);
}

TEST_CASE("is_cooperative ignores any change to the diagonal") {
    GeneratorConfig cfg;
    cfg.seed = 991;
    for (std::uint64_t k = 0; k < 40; ++k) {
        cfg.cooperative = (k % 2 == 0);
        const CoefficientMatrix A = gen_system(cfg, k);
        MatrixBody flipped = A.body();
        std::visit(
            [](auto& b) {
                using T = std::decay_t<decltype(b)>;
                auto flip = [](Matrix& m) {
                    for (Index i = 0; i < m.rows(); ++i) m(i, i) = -m(i, i);
                };
                if constexpr (std::is_same_v<T, ConstantBody>) {
                    flip(b.entries);
                } else if constexpr (std::is_same_v<T, PiecewiseConstantBody>) {
                    for (Matrix& p : b.pieces) flip(p);
                } else if constexpr (std::is_same_v<T, PolynomialBody>) {
                    for (Index i = 0; i < b.n; ++i) {
                        auto& c = b.coefficients[static_cast<std::size_t>(i * b.n + i)];
                        for (double& v : c) v = -v;
                    }
                } else {
                    for (Matrix& node : b.nodes) flip(node);
                }
            },
            flipped);
        const CoefficientMatrix B(A.window(), std::move(flipped));

        const auto ra = is_cooperative(A);
        const auto rb = is_cooperative(B);
        CHECK(ra.cooperative == rb.cooperative);
        REQUIRE(ra.violations.size() == rb.violations.size());
        for (std::size_t v = 0; v < ra.violations.size(); ++v) {
            CHECK(ra.violations[v].i == rb.violations[v].i);
            CHECK(ra.violations[v].j == rb.violations[v].j);
            CHECK(ra.violations[v].value == rb.violations[v].value);
        }
    }
}

TEST_CASE("classify_orthant follows the stated thresholds") {
    const auto interior = classify_orthant(vec({1, 2, 3}));
    CHECK(interior.tag == OrthantTag::Interior);
    CHECK_FALSE(interior.witness_index.has_value());

    const auto boundary = classify_orthant(vec({0, 1}));
    CHECK(boundary.tag == OrthantTag::BoundaryNonnegative);
    REQUIRE(boundary.witness_index.has_value());
    CHECK(*boundary.witness_index == 0);

    const auto outside = classify_orthant(vec({-1, 1}));
    CHECK(outside.tag == OrthantTag::Outside);
    REQUIRE(outside.witness_index.has_value());
    CHECK(*outside.witness_index == 0);

    Vector bad = vec({1, 1});
    bad(1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(classify_orthant(bad), NonFiniteInput);
    bad(1) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(classify_orthant(bad), NonFiniteInput);
}

TEST_CASE("zero tolerances partition by the sign of the minimum") {
    ToleranceProfile zero;
    zero.abs_tol = 0.0;
    zero.strict_tol = 0.0;

    Xoshiro256StarStar rng(7, 0);
    for (int trial = 0; trial < 500; ++trial) {
        Vector x(3);
        for (Index i = 0; i < 3; ++i) {
            const int kind = rng.uniform_int(0, 2);
            x(i) = (kind == 0) ? 0.0 : rng.uniform(-1.0, 1.0);
        }
        const double mn = x.minCoeff();
        const auto got = classify_orthant(x, zero).tag;
        if (mn > 0.0) CHECK(got == OrthantTag::Interior);
        if (mn == 0.0) CHECK(got == OrthantTag::BoundaryNonnegative);
        if (mn < 0.0) CHECK(got == OrthantTag::Outside);
    }
}

TEST_CASE("single-piece piecewise equals the constant body everywhere") {
    const Matrix entries = mat2(0.3, 1.2, 0.4, -0.7);
    const TimeWindow window(0.0, 2.0, 0.5);
    const auto constant = CoefficientMatrix(window, ConstantBody{entries});
    PiecewiseConstantBody single;
    single.pieces = {entries};
    const auto piecewise = CoefficientMatrix(window, std::move(single));

    for (double t : {0.01, 0.5, 1.0, 1.5, 1.99}) {
        CHECK((constant.at(t) - piecewise.at(t)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("trace_at equals the diagonal sum of evaluate, same arithmetic path") {
    CHECK(constant_system(mat2(-1, 0, 0, -2)).trace_at(3.7) == -3.0);
    CHECK(constant_system(mat2(0, 1, 1, 0)).trace_at(0.3) == 0.0);

    PolynomialBody body;
    body.n = 2;
    body.coefficients = {{0.0, 1.0}, {}, {}, {0.0, 1.0}};  // a11 = a22 = t
    const CoefficientMatrix A(TimeWindow(0.0, 3.0, 1.0), body);
    CHECK(A.trace_at(2.0) == 4.0);

    GeneratorConfig cfg;
    cfg.seed = 55;
    for (std::uint64_t k = 0; k < 20; ++k) {
        const CoefficientMatrix S = gen_system(cfg, k);
        Xoshiro256StarStar rng(cfg.seed, 1000 + k);
        for (int probe = 0; probe < 5; ++probe) {
            const double t = rng.uniform(kGeneratedT0, kGeneratedTEnd);
            CHECK(S.trace_at(t) == S.at(t).trace());
        }
    }
}

TEST_CASE("fingerprints separate different systems and match equal ones") {
    const auto a = constant_system(mat2(0, 1, 1, 0));
    const auto b = constant_system(mat2(0, 1, 1, 0));
    const auto c = constant_system(mat2(0, 1, 1, 1e-12));
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint() != c.fingerprint());
}
