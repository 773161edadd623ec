#include "spintop/baker_akhiezer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spintop {

namespace {

constexpr cplx I{0.0, 1.0};

int index_of(int j)
{
    if (j != 1 && j != 2) {
        throw Error(ErrorCode::invalid_argument, "BA index j must be 1 or 2");
    }
    return j - 1;
}

double zero_residual(cplx z, const ThetaModulus &m)
{
    const double here = std::abs(theta(z, m));
    double scale = 0.0;
    for (int k = 0; k < 4; ++k) {
        scale = std::max(scale, std::abs(theta(z + 0.1 * std::polar(1.0, 0.5 * pi * k), m)));
    }
    return here / scale;
}

cplx log_gamma(int idx, double t, const BAContext &ctx)
{
    const auto &c = ctx.curve;
    const auto &m = c.modulus;
    const cplx arg = ctx.A1 + c.V * t;
    if (theta1_reduced_magnitude(arg, m) < eps_pole) {
        throw Error(ErrorCode::canonical_window_violated, "theta1(A1 + V t) vanishes");
    }
    const cplx Q = ctx.AP[idx];
    return std::log(ctx.d[idx]) - t * (ctx.Omega0[idx] - 0.5 * c.V)
           + theta1_log(ctx.A1 - Q, m) + std::log(ctx.alpha_j[idx]) + std::log(ctx.theta1_d1)
           - theta1_log(arg, m) - theta1_log(-Q, m);
}

} // namespace

SurfacePoint divisor_from_state(const RotatorState &s, const CurveData &c)
{
    const Mat2 S = s_matrix(s);
    const cplx l = (s.variant == Variant::compact) ? cplx(s.momentum) : I * s.momentum;
    if (l == 0.0) {
        throw Error(ErrorCode::degenerate_divisor, "zero momentum gives no finite divisor point");
    }
    const cplx s12 = S(0, 1);
    if (std::abs(s12) < 1e-14 * s.a) {
        // mu = -L_11 ~ -s_11 / lambda near lambda = 0, and mu ~ +-a / lambda at 0+-.
        return c.marked_point((-S(0, 0)).real() > 0.0 ? Marked::zero_plus : Marked::zero_minus);
    }
    const cplx lambda = -s12 / l;
    const cplx target = -build_lax(s, lambda).L(0, 0);
    const SurfacePoint plus = point_at(lambda, Sheet::plus);
    const cplx m = mu(plus, c);
    return (std::abs(m - target) <= std::abs(m + target)) ? plus : point_at(lambda, Sheet::minus);
}

BAContext build_context_from_A1(const CurveData &c, cplx A1, const BAOptions &opt)
{
    const auto &m = c.modulus;
    const cplx c0 = cplx(0.0, pi) + 0.5 * c.B;
    const std::array<cplx, 2> Q{c.Ainf_plus, c.Ainf_minus};
    for (cplx z : {A1, A1 - Q[0], A1 - Q[1], Q[0], Q[1]}) {
        if (theta1_reduced_magnitude(z, m) < eps_pole) {
            throw Error(ErrorCode::degenerate_divisor, "theta1 vanishes at a required argument");
        }
    }

    std::array<cplx, 2> Om0{}, Om1{};
    double mismatch = 0.0;
    for (int k = 0; k < 2; ++k) {
        const auto ex = expansion_at_infinity_exact(k + 1, c);
        Om0[k] = ex.Omega0;
        Om1[k] = ex.Omega1;
        try {
            const auto sm = expansion_at_infinity(k + 1, c);
            mismatch = std::max({mismatch, std::abs(sm.Omega0 - ex.Omega0),
                                 std::abs(sm.Omega1 - ex.Omega1)});
        } catch (const Error &) {
            mismatch = std::numeric_limits<double>::infinity();
        }
    }

    BAContext ctx{
        .curve = c,
        .state0 = std::nullopt,
        .p0 = point_at(c.from_compact(c.lminus), Sheet::plus),
        .p1 = std::nullopt,
        .A1 = A1,
        .AP = Q,
        .A0 = {c.A0_plus, c.A0_minus},
        .c0 = c0,
        .c1 = A1 + c0,
        .cj = {Q[0] + c0, Q[1] + c0},
        .c = {A1 + Q[0] + c0, A1 + Q[1] + c0},
        .d = opt.d,
        .alpha_j = {c.alpha, -c.alpha},
        .Omega0 = Om0,
        .Omega1 = Om1,
        .omega_expansion_mismatch = mismatch,
        .condition_b = {zero_residual(0.0 - c0, m), zero_residual(Q[0] - (Q[0] + c0), m),
                        zero_residual(Q[1] - (Q[1] + c0), m)},
        .theta1_d1 = m.theta1_d1_at_zero(),
        .lattice = WeierstrassLattice(0.5 * c.Acal, 0.5 * c.Bcal),
        .wp_const = 0.0,
    };
    ctx.wp_const = solution_theta(0.0, ctx) - wp(A1 / c.alpha, ctx.lattice);
    return ctx;
}

BAContext build_context(const CurveData &c, const SurfacePoint &p1, const BAOptions &opt)
{
    BAContext ctx = build_context_from_A1(c, abel(p1, c), opt);
    ctx.p1 = p1;
    return ctx;
}

BAContext build_context_from_state(const CurveData &c, const RotatorState &s0, const BAOptions &opt)
{
    if (s0.variant != c.variant || s0.a != c.a) {
        throw Error(ErrorCode::invalid_argument, "state and curve describe different systems");
    }
    const SurfacePoint pb = divisor_from_state(s0, c);
    const cplx A1 = abel(pb, c) - c.Ainf_plus;
    BAContext ctx = build_context_from_A1(c, A1, opt);
    ctx.p1 = abel_inverse(A1, c);
    ctx.state0 = s0;
    return ctx;
}

cplx gamma_j(int j, double t, const BAContext &ctx)
{
    return std::exp(log_gamma(index_of(j), t, ctx));
}

cplx ba_minus_z(int j, cplx z, double t, const BAContext &ctx)
{
    const int idx = index_of(j);
    const auto &c = ctx.curve;
    const auto &m = c.modulus;
    const cplx Q = ctx.AP[idx];
    if (theta1_reduced_magnitude(z - ctx.A1, m) < eps_pole
        || theta1_reduced_magnitude(z - Q, m) < eps_pole) {
        throw Error(ErrorCode::pole, "BA function evaluated at its pole");
    }
    const cplx lg = log_gamma(idx, t, ctx) + t * (omega_sk(z, c) - 0.5 * c.V)
                    + theta1_log(z - ctx.A1 - Q - c.V * t, m) + theta1_log(z, m)
                    - theta1_log(z - ctx.A1, m) - theta1_log(z - Q, m);
    if (!(lg.real() < 700.0)) {
        throw Error(ErrorCode::overflow, "BA function overflows");
    }
    return std::exp(lg);
}

cplx ba_minus(int j, const SurfacePoint &p, double t, const BAContext &ctx)
{
    return ba_minus_z(j, abel(p, ctx.curve), t, ctx);
}

cplx ba_plus(int j, const SurfacePoint &p, double t, const BAContext &ctx)
{
    return std::exp(-mu(p, ctx.curve) * t) * ba_minus(j, p, t, ctx);
}

ExpansionCoeffs expansion_coeffs(int j, double t, const BAContext &ctx)
{
    index_of(j);
    const auto &c = ctx.curve;
    constexpr int n = 64;
    const double r = 1.0 / (8.0 * c.lplus);
    ExpansionCoeffs out{Vec2::Zero(), Vec2::Zero()};
    for (int k = 0; k < 2; ++k) {
        const Sheet s = (k == 0) ? Sheet::plus : Sheet::minus;
        cplx m1 = 0.0, m0 = 0.0;
        for (int q = 0; q < n; ++q) {
            const cplx zeta = r * std::polar(1.0, 2.0 * pi * (q + 0.5) / n);
            const cplx f = ba_minus(j, point_at(1.0 / zeta, s), t, ctx);
            m1 += f * zeta;
            m0 += f;
        }
        out.psi0(k) = m1 / static_cast<double>(n);
        out.psi1(k) = m0 / static_cast<double>(n);
    }
    return out;
}

ExpansionCoeffs expansion_coeffs_exact(int j, double t, const BAContext &ctx)
{
    const int idx = index_of(j);
    const int other = 1 - idx;
    const auto &c = ctx.curve;
    const auto &m = c.modulus;
    const cplx Q = ctx.AP[idx];
    ExpansionCoeffs out{Vec2::Zero(), Vec2::Zero()};
    out.psi0(idx) = ctx.d[idx];
    out.psi1(idx) = ctx.d[idx]
                    * (t * ctx.Omega1[idx]
                       + ctx.alpha_j[idx]
                             * (theta1_dlog(ctx.A1 + c.V * t, m, 1) + theta1_dlog(-Q, m, 1)
                                - theta1_dlog(ctx.A1 - Q, m, 1)));
    out.psi1(other) = ba_minus_z(j, ctx.AP[other], t, ctx);
    return out;
}

cplx solution_wp(double t, const BAContext &ctx)
{
    const auto &c = ctx.curve;
    return wp(2.0 * c.a * t + ctx.A1 / c.alpha, ctx.lattice) + ctx.wp_const;
}

cplx solution_theta(double t, const BAContext &ctx)
{
    const auto &c = ctx.curve;
    const cplx s11 = ctx.alpha_j[0] * c.V * theta1_dlog(ctx.A1 + c.V * t, c.modulus, 2) + ctx.Omega1[0];
    if (c.variant == Variant::compact) {
        return 0.5 - s11 / (2.0 * c.a);
    }
    return -0.5 * (s11 / c.a + 1.0);
}

namespace {

double real_checked(cplx v)
{
    if (!(std::abs(v.imag()) <= 1e-9 * std::max(1.0, std::abs(v.real())))) {
        throw Error(ErrorCode::identity_violation, "observable has a non-negligible imaginary part");
    }
    return v.real();
}

} // namespace

double solution_sin2(double t, const BAContext &ctx)
{
    if (ctx.curve.variant != Variant::compact) {
        throw Error(ErrorCode::invalid_argument, "sin^2 phi needs the compact variant");
    }
    return real_checked(solution_wp(t, ctx));
}

double solution_sinh2(double t, const BAContext &ctx)
{
    if (ctx.curve.variant != Variant::noncompact) {
        throw Error(ErrorCode::invalid_argument, "sinh^2 q needs the noncompact variant");
    }
    return real_checked(solution_wp(t, ctx));
}

double fd_step(const BAContext &ctx)
{
    const auto &c = ctx.curve;
    return 1e-5 * std::min(std::abs(c.Acal), std::abs(c.Bcal)) / (2.0 * c.a);
}

double check_sinid(int j, double t, const BAContext &ctx, const RotatorState &oracle)
{
    const int idx = index_of(j);
    const int other = 1 - idx;
    const double h = fd_step(ctx);
    const cplx Qs = ctx.AP[other];
    const cplx lhs = (ba_minus_z(j, Qs, t + h, ctx) - ba_minus_z(j, Qs, t - h, ctx)) / (2.0 * h);
    const cplx rhs = ctx.d[idx] * s_matrix(oracle)(other, idx);
    return std::abs(lhs - rhs);
}

double check_cosid(int j, double t, const BAContext &ctx, const RotatorState &oracle)
{
    const int idx = index_of(j);
    const auto &c = ctx.curve;
    const cplx lhs =
        ctx.alpha_j[idx] * c.V * theta1_dlog(ctx.A1 + c.V * t, c.modulus, 2) + ctx.Omega1[idx];
    return std::abs(lhs - s_matrix(oracle)(idx, idx));
}

} // namespace spintop
