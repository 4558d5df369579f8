#include "doctest.h"

#include <cmath>
#include <random>

#include "fdabs/exponents.hpp"

using namespace fdabs;

TEST_CASE("validate_params accepts the admissible window") {
    const Params p = validate_params(1, 0.5, 0.75);
    CHECK(p.N == 1.0);
    CHECK(p.m == 0.5);
    CHECK(p.q == 0.75);
}

TEST_CASE("validate_params identifies the failed constraint") {
    // (N-2)/N = 1/3 > 0.2
    CHECK_THROWS_WITH_AS(validate_params(3, 0.2, 0.5),
                         doctest::Contains("SobolevViolation"), Error);
    CHECK_THROWS_WITH_AS(validate_params(2, 0.75, 0.5),
                         doctest::Contains("OrderViolation"), Error);
    CHECK_THROWS_AS(validate_params(2, -0.1, 0.5), Error);
    CHECK_THROWS_AS(validate_params(1, 0.5, 1.0), Error);
    CHECK_THROWS_AS(validate_params(0.5, 0.3, 0.5), Error);

    try {
        validate_params(3, 0.2, 0.5);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::sobolev_violation);
    }
    try {
        validate_params(2, 0.75, 0.5);
    } catch (const Error& e) {
        CHECK(e.code() == Errc::order_violation);
    }
}

TEST_CASE("derive reproduces the closed forms at N=1, m=0.5, q=0.75") {
    const DerivedExponents ex = derive(validate_params(1, 0.5, 0.75));
    CHECK(ex.alpha == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(ex.beta == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(ex.rate(NormOrder::finite(1)) == doctest::Approx(3.5));
    CHECK(ex.rate(NormOrder::finite(1.5)) ==
          doctest::Approx(11.0 / 3.0).epsilon(1e-14));
    CHECK(ex.gamma == doctest::Approx(9.0 / 11.0).epsilon(1e-14));
    CHECK(1.0 / (1.0 - ex.gamma) == doctest::Approx(5.5).epsilon(1e-14));
    CHECK((0.5 + 1.0) * ex.alpha - 1.0 * ex.beta ==
          doctest::Approx(5.5).epsilon(1e-14));
    CHECK(ex.kappa_star == doctest::Approx(160000.0).epsilon(1e-12));
    CHECK(ex.decay == doctest::Approx(8.0).epsilon(1e-15));
    CHECK(ex.theta == doctest::Approx(2.0 / 27.0).epsilon(1e-14));
}

TEST_CASE("rate is the infinity norm exponent at r = inf") {
    const DerivedExponents ex = derive(validate_params(2, 0.4, 0.8));
    CHECK(ex.rate(NormOrder::inf()) == ex.alpha);
}

TEST_CASE("exponent identity and ranges over random admissible triples") {
    std::mt19937_64 rng(20240817);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> dim(1, 4);

    for (int trial = 0; trial < 10000; ++trial) {
        const double N = dim(rng);
        const double lo = std::max(N - 2.0, 0.0) / N;
        const double m = lo + (1.0 - lo) * unit(rng) * 0.999 + 1e-6;
        const double q = m + (1.0 - m) * (1e-6 + 0.999 * unit(rng));
        if (!(m < q && q < 1.0)) continue;
        const DerivedExponents ex = derive(validate_params(N, m, q));

        CHECK(ex.alpha > 0.0);
        CHECK(ex.gamma > 0.0);
        CHECK(ex.gamma < 1.0);
        CHECK(ex.theta > 0.0);
        CHECK(ex.theta < 1.0);
        CHECK(2.0 * q / (q - m) > N);

        const double lhs = (m + 1.0) * ex.alpha - N * ex.beta;
        const double rhs = 1.0 / ex.gamma_complement;  // 1/(1-gamma), stable
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::fabs(rhs));
        CHECK(ex.gamma_complement ==
              doctest::Approx(1.0 - ex.gamma).epsilon(1e-9));
    }
}

TEST_CASE("rate(r) is non-decreasing in r toward rate(inf) = alpha") {
    // beta > 0 in this regime, so the exponent grows with the norm order
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double m = 0.05 + 0.9 * unit(rng);
        const double q = m + (1.0 - m) * (0.01 + 0.98 * unit(rng));
        if (!(q < 1.0)) continue;
        const DerivedExponents ex = derive(validate_params(1, m, q));
        double prev = -1e300;
        for (double r = 1.0; r <= 64.0; r *= 2.0) {
            const double cur = ex.rate(NormOrder::finite(r));
            CHECK(cur >= prev);
            prev = cur;
        }
        CHECK(ex.rate(NormOrder::inf()) >= prev);
    }
}

TEST_CASE("unit sphere area matches the classical values") {
    CHECK(unit_sphere_area(1) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(unit_sphere_area(2) == doctest::Approx(2 * M_PI).epsilon(1e-14));
    CHECK(unit_sphere_area(3) == doctest::Approx(4 * M_PI).epsilon(1e-14));
}
