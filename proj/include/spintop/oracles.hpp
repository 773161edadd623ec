#pragma once

// Reference computations that share no code path with the pipeline they judge:
// a direct lattice sum for p, a Taylor exponential, and the Jacobi closed forms
// of the two rotators built on std::ellint_1.

#include "spintop/lax_dynamics.hpp"
#include "spintop/types.hpp"

namespace spintop::oracle {

/// 1/u^2 + sum' [1/(u-w)^2 - 1/w^2] over w = 2m omega1 + 2n omega2, |m|,|n| <= N.
cplx wp_lattice_sum(cplx u, cplx omega1, cplx omega2, int N);
/// Richardson in N^-2, N^-3, N^-4 over N = n0, 2 n0, 4 n0, 8 n0.
cplx wp_lattice(cplx u, cplx omega1, cplx omega2, int n0 = 50);

/// exp(M) by scaling and squaring of a truncated Taylor series.
Mat2 expm_taylor(const Mat2 &M);

/// am(u | m) by Newton on F(phi | m) = u; m in [0, 1).
double amplitude(double u, double m);

/// sin^2 phi(t) (compact, sn form) or sinh^2 q(t) (noncompact, sc form) for the
/// trajectory through s0 at t = 0. Requires H > a^2.
double observable(const RotatorState &s0, double t);

/// Blow-up time of the noncompact trajectory through s0 (sc hitting its pole).
double blowup_time(const RotatorState &s0);

} // namespace spintop::oracle
