#include <doctest.h>

#include <cmath>

#include "spintop/oracles.hpp"

using namespace spintop;

TEST_CASE("lattice sum converges to the Laurent behaviour at the origin")
{
    const cplx w1(1.0, 0.0), w2(0.2, 1.7);
    // wp(u) - 1/u^2 = O(u^2)
    const cplx u(1e-3, 2e-3);
    CHECK(std::abs(oracle::wp_lattice(u, w1, w2) - 1.0 / (u * u)) < 1e-4);
    // even, and periodic in the full periods
    const cplx v(0.31, 0.44);
    const cplx p = oracle::wp_lattice(v, w1, w2);
    CHECK(std::abs(oracle::wp_lattice(-v, w1, w2) - p) < 1e-10 * std::abs(p));
    CHECK(std::abs(oracle::wp_lattice(v + 2.0 * w1, w1, w2) - p) < 1e-8 * std::abs(p));
}

TEST_CASE("Taylor exponential")
{
    Mat2 D = Mat2::Zero();
    D(0, 0) = 3.0;
    D(1, 1) = cplx(0.0, -2.0);
    const Mat2 E = oracle::expm_taylor(D);
    CHECK(std::abs(E(0, 0) - std::exp(3.0)) < 1e-12 * std::exp(3.0));
    CHECK(std::abs(E(1, 1) - std::exp(cplx(0.0, -2.0))) < 1e-14);
    CHECK(std::abs(E(0, 1)) < 1e-15);
}

TEST_CASE("amplitude inverts the incomplete integral")
{
    for (double m : {0.0, 0.3, 0.8}) {
        for (double phi : {-4.0, 0.2, 1.3, 7.5}) {
            const double n = std::round(phi / pi);
            const double u = std::ellint_1(std::sqrt(m), phi - n * pi) + 2.0 * n * std::comp_ellint_1(std::sqrt(m));
            CHECK(oracle::amplitude(u, m) == doctest::Approx(phi).epsilon(1e-13));
        }
    }
}

TEST_CASE("closed forms start from the initial data")
{
    const RotatorState c{Variant::compact, 1.0, 0.4, -3.1, 0.0};
    CHECK(oracle::observable(c, 0.0) == doctest::Approx(std::pow(std::sin(0.4), 2)).epsilon(1e-14));
    const RotatorState n{Variant::noncompact, 1.0, 0.3, 2.9, 0.0};
    CHECK(oracle::observable(n, 0.0) == doctest::Approx(std::pow(std::sinh(0.3), 2)).epsilon(1e-14));
    CHECK(oracle::blowup_time(n) > 0.0);
    CHECK_THROWS_AS(oracle::blowup_time(c), Error);
    // an oscillating top is outside the rotating regime
    CHECK_THROWS_AS(oracle::observable({Variant::compact, 1.0, 0.0, 0.5, 0.0}, 0.1), Error);
}
