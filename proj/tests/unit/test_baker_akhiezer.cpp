#include <doctest.h>

#include <cmath>

#include "spintop/baker_akhiezer.hpp"
#include "spintop/oracles.hpp"

using namespace spintop;

namespace {

double rel(cplx x, cplx y) { return std::abs(x - y) / std::abs(y); }

struct Setup {
    CurveData curve;
    RotatorState s0;
    BAContext ctx;
};

Setup make(Variant v, double a = 1.0, double E = 3.0)
{
    const CurveData c = build_curve(a, E, v);
    const RotatorState s0 = initial_state(v, a, E);
    return {c, s0, build_context_from_state(c, s0)};
}

} // namespace

TEST_CASE("divisor from the initial state")
{
    const Setup cs = make(Variant::compact);
    // phi(0) = 0 puts A1 on a half period
    CHECK(std::abs(cs.ctx.A1 - cplx(0.0, -pi)) < 1e-10);
    REQUIRE(cs.ctx.p1);
    CHECK(std::abs(cs.ctx.p1->lambda - cs.curve.lplus) < 1e-6);
    // compact: A1/alpha imaginary, noncompact: real
    CHECK(std::abs((cs.ctx.A1 / cs.curve.alpha).real()) < 1e-10);
    const Setup ns = make(Variant::noncompact);
    CHECK(std::abs((ns.ctx.A1 / ns.curve.alpha).imag()) < 1e-10);

    RotatorState still = cs.s0;
    still.momentum = 0.0;
    CHECK_THROWS_AS(divisor_from_state(still, cs.curve), Error);
}

TEST_CASE("normalisation at the points at infinity")
{
    for (Variant v : {Variant::compact, Variant::noncompact}) {
        const Setup s = make(v);
        for (double t : {0.0, 0.2, 0.45}) {
            for (int j : {1, 2}) {
                const ExpansionCoeffs e = expansion_coeffs(j, t, s.ctx);
                CHECK(std::abs(e.psi0(j - 1) - s.ctx.d[j - 1]) < 1e-10);
                CHECK(std::abs(e.psi0(2 - j)) < 1e-10);
                const ExpansionCoeffs x = expansion_coeffs_exact(j, t, s.ctx);
                CHECK((e.psi1 - x.psi1).norm() < 1e-9);
            }
        }
    }
}

TEST_CASE("single-valued on the curve")
{
    const Setup s = make(Variant::compact, 1.0, 5.0);
    const cplx z(0.4, 1.3);
    for (int j : {1, 2}) {
        const cplx f = ba_minus_z(j, z, 0.3, s.ctx);
        CHECK(rel(ba_minus_z(j, z + two_pi_i, 0.3, s.ctx), f) < 1e-10);
        CHECK(rel(ba_minus_z(j, z + s.curve.B, 0.3, s.ctx), f) < 1e-10);
    }
    CHECK_THROWS_AS(ba_minus_z(1, s.ctx.A1, 0.3, s.ctx), Error);
    CHECK_THROWS_AS(ba_minus_z(3, z, 0.3, s.ctx), Error);
}

TEST_CASE("eigenvectors of the evolved Lax matrix")
{
    for (Variant v : {Variant::compact, Variant::noncompact}) {
        const Setup s = make(v);
        for (double t : {0.0, 0.13, 0.41}) {
            const RotatorState st = t == 0.0 ? s.s0 : evolve_state(s.s0, t, 1e-4);
            for (cplx lam : {std::polar(1.0, 0.7), cplx(-0.6, 1.7)}) {
                const Mat2 L = build_lax(st, lam).L;
                for (Sheet sh : {Sheet::plus, Sheet::minus}) {
                    const SurfacePoint p = point_at(lam, sh);
                    const Vec2 col(ba_minus(1, p, t, s.ctx), ba_minus(2, p, t, s.ctx));
                    CHECK((L * col - mu(p, s.curve) * col).norm() < 1e-9 * col.norm());
                }
            }
        }
    }
}

TEST_CASE("theta and Weierstrass forms of the solution")
{
    const Setup cs = make(Variant::compact);
    const double T = rotation_period(1.0, 3.0);
    RotatorState st = cs.s0;
    for (int k = 0; k <= 16; ++k) {
        const double t = T * k / 16;
        if (t > st.t) {
            st = evolve_state(st, t - st.t, 1e-4);
        }
        const double phi2 = std::pow(std::sin(st.angle), 2);
        CHECK(std::abs(solution_sin2(t, cs.ctx) - phi2) < 1e-10);
        CHECK(std::abs(solution_theta(t, cs.ctx) - phi2) < 1e-10);
        CHECK(std::abs(solution_sin2(t, cs.ctx) - oracle::observable(cs.s0, t)) < 1e-10);
    }
    CHECK_THROWS_AS(solution_sinh2(0.1, cs.ctx), Error);

    const Setup ns = make(Variant::noncompact);
    for (double t : {0.1, 0.3, 0.5, 0.6}) {
        const double ref = oracle::observable(ns.s0, t);
        CHECK(std::abs(solution_sinh2(t, ns.ctx) - ref) < 1e-10 * std::max(1.0, ref));
    }
}

TEST_CASE("a general initial state is reproduced")
{
    const RotatorState s0{Variant::compact, 1.0, 0.4, -3.1, 0.0};
    const CurveData c = build_curve(1.0, hamiltonian(s0));
    const BAContext ctx = build_context_from_state(c, s0);
    for (double t : {0.0, 0.2, 0.7}) {
        CHECK(std::abs(solution_sin2(t, ctx) - oracle::observable(s0, t)) < 1e-9);
    }
}

TEST_CASE("trace identities for the residue matrix")
{
    for (Variant v : {Variant::compact, Variant::noncompact}) {
        const Setup s = make(v);
        for (double t : {0.05, 0.3}) {
            const RotatorState st = evolve_state(s.s0, t, 1e-4);
            for (int j : {1, 2}) {
                CHECK(check_sinid(j, t, s.ctx, st) < 1e-6);
                CHECK(check_cosid(j, t, s.ctx, st) < 1e-9);
            }
        }
    }
}

TEST_CASE("context from an explicit divisor point")
{
    const CurveData c = build_curve(1.0, 3.0);
    const SurfacePoint p1 = point_at({0.7, 0.9}, Sheet::plus);
    const BAContext ctx = build_context(c, p1);
    CHECK(std::abs(ctx.A1 - abel(p1, c)) < 1e-15);
    // the pole of phi sits at p1
    CHECK_THROWS_AS(ba_minus(1, p1, 0.0, ctx), Error);
    // residue normalisation holds for any divisor
    const ExpansionCoeffs e = expansion_coeffs(1, 0.2, ctx);
    CHECK(std::abs(e.psi0(0) - 1.0) < 1e-9);
    CHECK_THROWS_AS(build_context_from_A1(c, c.Ainf_plus), Error);
}
