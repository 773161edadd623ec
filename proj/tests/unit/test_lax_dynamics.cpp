#include <doctest.h>

#include <cmath>

#include "spintop/lax_dynamics.hpp"
#include "spintop/oracles.hpp"
#include "spintop/special_functions.hpp"

using namespace spintop;

TEST_CASE("initial state convention")
{
    const RotatorState s = initial_state(Variant::compact, 1.0, 3.0);
    CHECK(s.angle == 0.0);
    CHECK(s.momentum == doctest::Approx(std::sqrt(8.0)));
    CHECK(hamiltonian(s) == doctest::Approx(3.0).epsilon(1e-15));
    CHECK(hamiltonian(initial_state(Variant::noncompact, 2.0, 7.0)) == doctest::Approx(7.0).epsilon(1e-15));
    CHECK_THROWS_AS(initial_state(Variant::compact, 0.0, 3.0), Error);
}

TEST_CASE("Lax matrix structure")
{
    const RotatorState s{Variant::compact, 1.2, 0.4, -0.7, 0.0};
    const cplx lam(0.8, 0.3);
    const LaxSample x = build_lax(s, lam);
    CHECK(std::abs(x.L.trace()) < 1e-15);
    CHECK((x.L - (x.Mplus - x.Mminus)).norm() < 1e-15);
    // det L is the spectral curve: -det L = a^2 w^2 / lambda^2 with E = H
    const double a = s.a, e = hamiltonian(s) / (a * a);
    const cplx w2 = std::pow(lam, 4) - 2.0 * e * lam * lam + 1.0;
    CHECK(std::abs(-x.L.determinant() - a * a * w2 / (lam * lam)) < 1e-13);
    CHECK_THROWS_AS(build_lax(s, 0.0), Error);
}

TEST_CASE("Hamiltonian from the Laurent coefficient of tr L^2")
{
    for (Variant v : {Variant::compact, Variant::noncompact}) {
        const RotatorState s{v, 0.9, 0.3, 2.5, 0.0};
        CHECK(hamiltonian_from_lax(s) == doctest::Approx(hamiltonian(s)).epsilon(1e-13));
    }
}

TEST_CASE("the phase flow is the Lax equation dL/dt = [L, M+]")
{
    for (Variant v : {Variant::compact, Variant::noncompact}) {
        const RotatorState s{v, 1.0, 0.2, 2.9, 0.0};
        const cplx lam(1.1, -0.4);
        const double h = 1e-3;
        auto L_at = [&](double dt) {
            RotatorState x = s;
            for (int k = 0; k < 8; ++k) {
                x = rk4_step(x, dt / 8.0);
            }
            return build_lax(x, lam).L;
        };
        const Mat2 dL = (-L_at(2 * h) + 8.0 * L_at(h) - 8.0 * L_at(-h) + L_at(-2 * h)) / (12.0 * h);
        const LaxSample x = build_lax(s, lam);
        const Mat2 rhs = x.L * x.Mplus - x.Mplus * x.L;
        CHECK((dL - rhs).norm() < 1e-9 * rhs.norm());
    }
}

TEST_CASE("RK4 against the closed forms")
{
    const RotatorState s = initial_state(Variant::compact, 1.0, 3.0);
    const double T = rotation_period(1.0, 3.0);
    CHECK(T == doctest::Approx(2.0 * 1.8540746773013719 / std::sqrt(8.0)).epsilon(1e-14));
    const Trajectory tr = integrate_phase(s, T, T / 2048);
    double worst = 0.0;
    for (std::size_t k = 0; k < tr.t.size(); k += 64) {
        const double sn = jacobi_sn(std::sqrt(8.0) * tr.t[k], {0.5});
        worst = std::max(worst, std::abs(std::pow(std::sin(tr.angle[k]), 2) - sn * sn));
    }
    CHECK(worst < 1e-10);
    // phi advances by pi over a period
    CHECK(tr.angle.back() == doctest::Approx(pi).epsilon(1e-10));
}

TEST_CASE("energy conservation over five periods")
{
    const RotatorState s = initial_state(Variant::compact, 1.0, 3.0);
    const double T = rotation_period(1.0, 3.0);
    const Trajectory tr = integrate_phase(s, 5.0 * T, T / 4096);
    double drift = 0.0;
    for (std::size_t k = 0; k < tr.t.size(); ++k) {
        drift = std::max(drift, std::abs(hamiltonian({s.variant, s.a, tr.angle[k], tr.momentum[k], 0.0}) - 3.0));
    }
    CHECK(drift < 1e-9);
}

TEST_CASE("isospectrality of the coupled Lax flow")
{
    const RotatorState s = initial_state(Variant::compact, 1.0, 3.0);
    const cplx lam = std::polar(1.3, 0.4);
    const LaxTrajectory lt = integrate_lax(s, lam, rotation_period(1.0, 3.0), 1e-3);
    const cplx d0 = lt.L.front().determinant();
    double drift = 0.0;
    for (std::size_t k = 0; k < lt.L.size(); ++k) {
        drift = std::max(drift, std::abs(lt.L[k].determinant() - d0) / std::abs(d0));
        // the matrix flow stays on the Lax matrix of the phase flow
        CHECK((lt.L[k] - build_lax(lt.states[k], lam).L).norm() < 1e-10);
    }
    CHECK(drift < 1e-8);
}

TEST_CASE("noncompact trajectory blows up at the closed-form time")
{
    const RotatorState s = initial_state(Variant::noncompact, 1.0, 3.0);
    const Trajectory tr = integrate_phase(s, 1.0, 1e-3);
    REQUIRE(tr.blowup);
    const double ts = oracle::blowup_time(s);
    CHECK(ts == doctest::Approx(0.65551438857303013).epsilon(1e-13));
    CHECK(std::abs(tr.blowup->first - ts) < 1e-8);
    CHECK_THROWS_AS(evolve_state(s, 1.0, 1e-3), Error);
}

TEST_CASE("closed-form matrix exponential")
{
    const RotatorState s{Variant::noncompact, 1.0, 0.1, 1.7, 0.0};
    for (cplx lam : {cplx(1.0, 0.0), cplx(0.3, 1.9), cplx(-2.0, 0.5)}) {
        for (double t : {0.0, 1e-9, 0.37, 1.5}) {
            const Mat2 L = build_lax(s, lam).L;
            const Mat2 ref = oracle::expm_taylor(t * L);
            CHECK((matrix_exp(L, t) - ref).norm() < 1e-12 * ref.norm());
        }
    }
    // nilpotent: exp(tL) = I + tL
    Mat2 N;
    N << 0.0, 2.0, 0.0, 0.0;
    CHECK((matrix_exp(N, 0.7) - (Mat2::Identity() + 0.7 * N)).norm() < 1e-15);
}

TEST_CASE("rotation period requires a rotating top")
{
    CHECK_THROWS_AS(rotation_period(1.0, 0.5), Error);
    CHECK(modulus_ksq(1.0, 3.0) == doctest::Approx(0.5));
}
