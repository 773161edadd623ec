#pragma once

// Theta-function Baker-Akhiezer functions of the SO(2) top.
//
// With z = A(p), Q_j = A(P_j) (P_1 = inf+, P_2 = inf-) and A1 = A(p1),
//
//   phi^j(p, t) = gamma_j(t) exp(t Omega~(z)) theta1(z - A1 - Q_j - V t) theta1(z)
//                 / [theta1(z - A1) theta1(z - Q_j)],       Omega~ = Omega - V/2,
//
// normalised so that lambda^-1 phi^j -> d_j at P_j. Everything is evaluated in the
// log domain and exponentiated once.

#include <array>
#include <optional>

#include "spintop/lax_dynamics.hpp"
#include "spintop/spectral_curve.hpp"

namespace spintop {

struct BAOptions {
    std::array<cplx, 2> d{1.0, 1.0};
};

struct BAContext {
    CurveData curve;
    std::optional<RotatorState> state0;  // present when built from initial data
    SurfacePoint p0;                     // base point l-
    std::optional<SurfacePoint> p1;      // divisor point, if the Abel inverse succeeded
    cplx A1;
    std::array<cplx, 2> AP;  // A(inf+), A(inf-)
    std::array<cplx, 2> A0;  // A(0+), A(0-)
    cplx c0, c1;
    std::array<cplx, 2> cj, c;
    std::array<cplx, 2> d, alpha_j, Omega0, Omega1;
    double omega_expansion_mismatch;  // sampled vs closed-form Omega_j^0, Omega_j^1
    std::array<double, 3> condition_b;  // zero residuals at p0, P1, P2
    cplx theta1_d1;                     // theta1'(0)
    WeierstrassLattice lattice;         // half periods Acal/2, Bcal/2
    cplx wp_const;                      // sin^2 (or sinh^2) = wp(2at + A1/alpha) + wp_const
};

/// Divisor point read off the initial Lax matrix: L_12(lambda_b) = 0 on the sheet
/// where mu = -L_11. For s_12 = 0 this is the marked point over lambda = 0.
SurfacePoint divisor_from_state(const RotatorState &s, const CurveData &c);

BAContext build_context(const CurveData &c, const SurfacePoint &p1, const BAOptions &opt = {});
BAContext build_context_from_A1(const CurveData &c, cplx A1, const BAOptions &opt = {});
/// A1 = A(p_b) - A(inf+) with p_b from divisor_from_state; reproduces the given
/// initial data at t = 0.
BAContext build_context_from_state(const CurveData &c, const RotatorState &s0,
                                   const BAOptions &opt = {});

cplx gamma_j(int j, double t, const BAContext &ctx);

/// phi^j_-(p, t) by Abel image z = A(p).
cplx ba_minus_z(int j, cplx z, double t, const BAContext &ctx);
cplx ba_minus(int j, const SurfacePoint &p, double t, const BAContext &ctx);
/// phi^j_+ = exp(-mu(p) t) phi^j_-.
cplx ba_plus(int j, const SurfacePoint &p, double t, const BAContext &ctx);

struct ExpansionCoeffs {
    Vec2 psi0;  // components over P_1, P_2
    Vec2 psi1;
};

/// phi^j_- = lambda psi0 + psi1 + O(1/lambda), from Cauchy integrals on
/// |lambda| = 8 l+ around each point at infinity.
ExpansionCoeffs expansion_coeffs(int j, double t, const BAContext &ctx);
/// The same coefficients from the theta expansions at P_j and P_j*.
ExpansionCoeffs expansion_coeffs_exact(int j, double t, const BAContext &ctx);

/// sin^2 phi (compact) or sinh^2 q (noncompact) from the Weierstrass form.
cplx solution_wp(double t, const BAContext &ctx);
/// The same observable from the theta form with no fitted constant:
/// s_11 = alpha V (log theta1)''(A1 + V t) + Omega_1^1.
cplx solution_theta(double t, const BAContext &ctx);

/// Real observables; throw identity_violation if the imaginary part exceeds 1e-9.
double solution_sin2(double t, const BAContext &ctx);
double solution_sinh2(double t, const BAContext &ctx);

/// Time step for finite-difference diagnostics, 1e-5 of the real period scale.
double fd_step(const BAContext &ctx);

/// |d/dt phi^j(P_j*, t) - d_j s_{j* j}(t)| with s from the oracle state at t.
double check_sinid(int j, double t, const BAContext &ctx, const RotatorState &oracle);
/// |alpha_j V (log theta1)''(A1 + V t) + Omega_j^1 - s_jj(t)|.
double check_cosid(int j, double t, const BAContext &ctx, const RotatorState &oracle);

} // namespace spintop
