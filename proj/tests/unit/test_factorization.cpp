#include <doctest.h>

#include <cmath>

#include "spintop/factorization.hpp"
#include "spintop/oracles.hpp"

using namespace spintop;

namespace {

struct Setup {
    CurveData curve;
    RotatorState s0;
    BAContext ctx;
};

Setup make(Variant v)
{
    const CurveData c = build_curve(1.0, 3.0, v);
    const RotatorState s0 = initial_state(v, 1.0, 3.0);
    return {c, s0, build_context_from_state(c, s0)};
}

} // namespace

TEST_CASE("factorization reproduces exp(tL) on the unit circle")
{
    const Setup s = make(Variant::compact);
    const double T = rotation_period(1.0, 3.0);
    const FactorizationReport rep =
        verify_factorization(s.s0, s.ctx, {0.0, 0.05 * T, 0.1 * T, 0.2 * T}, circle_contour());
    CHECK(rep.samples.size() == 4 * 64);
    CHECK(rep.skipped.empty());
    CHECK(rep.max_residual < 1e-10);
    CHECK(rep.max_det_error < 1e-12);
    CHECK(rep.classification == Classification::canonical);
    CHECK_FALSE(rep.blowup_time_estimate);
}

TEST_CASE("g factors are the identity at t = 0")
{
    const Setup s = make(Variant::compact);
    const FactorPair fp = factor_pair(s.s0, s.ctx, std::polar(0.8, 1.1), 0.0);
    CHECK((fp.gplus - Mat2::Identity()).norm() < 1e-13);
    CHECK((fp.gminus - Mat2::Identity()).norm() < 1e-13);
}

TEST_CASE("g- stays bounded at large lambda and g+ at small lambda")
{
    const Setup s = make(Variant::compact);
    const double t = 0.2;
    double gm_large = 0.0, gp_small = 0.0, gp_large = 0.0;
    for (double r : {10.0, 100.0}) {
        const cplx lam = std::polar(r, 0.3);
        gm_large = std::max(gm_large, g_factor(lam, t, s.ctx, FactorSign::minus).norm());
        gp_large = std::max(gp_large, g_factor(lam, t, s.ctx, FactorSign::plus).norm());
        const cplx small = std::polar(1.0 / r, 0.3);
        gp_small = std::max(gp_small, g_factor(small, t, s.ctx, FactorSign::plus).norm());
    }
    CHECK(gm_large < 10.0);
    CHECK(gp_small < 10.0);
    // the other factor carries the essential singularity
    CHECK(gp_large > 1e6);
}

TEST_CASE("conjugation by g+ and g- evolves L")
{
    const Setup s = make(Variant::compact);
    for (auto [lam, t] : {std::pair{std::polar(1.0, pi / 5), 0.2}, std::pair{cplx(0.4, -1.6), 0.05}}) {
        const Conjugation cg = evolve_by_conjugation(s.s0, s.ctx, lam, t);
        CHECK(cg.plus_minus < 1e-10);
        CHECK(cg.oracle < 1e-10);
    }
}

TEST_CASE("sheets coincide over branch points")
{
    const Setup s = make(Variant::compact);
    CHECK_THROWS_AS(build_Phi(s.curve.lplus, 0.1, s.ctx, FactorSign::minus), Error);
}

TEST_CASE("noncompact blow-up time and the canonical window")
{
    const Setup s = make(Variant::noncompact);
    const auto tb = detect_blowup(s.ctx);
    REQUIRE(tb);
    const double ref = oracle::blowup_time(s.s0);
    CHECK(std::abs(*tb - ref) < 1e-9);
    const cplx u0 = u0_integral({modulus_ksq(1.0, 3.0)}, Variant::noncompact);
    CHECK(std::abs(*tb - u0.real() / 2.0) < 1e-9);

    const auto contour = circle_contour();
    const auto early = verify_factorization(s.s0, s.ctx, {0.5 * *tb, *tb - 1e-3}, contour);
    CHECK(early.classification == Classification::canonical);
    CHECK(early.max_residual < 1e-6);
    const auto late = verify_factorization(s.s0, s.ctx, {*tb - 1e-7}, contour);
    CHECK(late.classification == Classification::non_canonical_suspected);
    CHECK(late.theta_window.front() < eps_canonical);
    // a grid reaching past t* is flagged as well
    const auto past = verify_factorization(s.s0, s.ctx, {0.1, 1.2 * *tb}, contour);
    CHECK(past.classification == Classification::non_canonical_suspected);
}

TEST_CASE("blow-up time for a constructed divisor")
{
    const CurveData c = build_curve(1.0, 3.0, Variant::noncompact);
    // 2 a t + A1/alpha reaches the lattice point 0 at t = 0.5
    const BAContext ctx = build_context_from_A1(c, -2.0 * c.a * c.alpha * 0.5);
    const auto tb = detect_blowup(ctx);
    REQUIRE(tb);
    CHECK(*tb == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("contour construction")
{
    const auto pts = circle_contour(2.0, 8);
    CHECK(pts.size() == 8);
    CHECK(std::abs(pts[2] - cplx(0.0, 2.0)) < 1e-15);
    CHECK_THROWS_AS(circle_contour(0.0, 8), Error);
}
