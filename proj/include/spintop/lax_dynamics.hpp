#pragma once

// Lax matrix of the SO(2) top and its noncompact counterpart, with the ODE
// oracles used to judge the algebro-geometric pipeline.
//
// compact:    H = l^2 / 2 - a^2 cos 2 phi,    phi'' = -2 a^2 sin 2 phi
// noncompact: H = q'^2 / 2 - a^2 cosh 2 q,    q''   =  2 a^2 sinh 2 q
// Both flows satisfy dL/dt = [L, M+] with M+ = l + a lambda.

#include <optional>
#include <utility>
#include <vector>

#include "spintop/types.hpp"

namespace spintop {

struct RotatorState {
    Variant variant = Variant::compact;
    double a = 1.0;
    double angle = 0.0;     // phi, or q
    double momentum = 0.0;  // phi', or q' (the Lax entry is then l = i q')
    double t = 0.0;
};

/// angle 0 and momentum +sqrt(2 (E + a^2)), the convention of the closed forms.
RotatorState initial_state(Variant v, double a, double E);

struct LaxSample {
    cplx lambda;
    Mat2 L;
    Mat2 Mplus;
    Mat2 Mminus;  // L = Mplus - Mminus
};

LaxSample build_lax(const RotatorState &s, cplx lambda);

/// lambda^-1 coefficient of L.
Mat2 s_matrix(const RotatorState &s);

double hamiltonian(const RotatorState &s);

/// Energy recovered from the lambda^0 Laurent coefficient of tr L^2, sampled on
/// |lambda| = 1 (H = -c0/4 compact, +c0/4 noncompact).
double hamiltonian_from_lax(const RotatorState &s);

/// Right-hand side of the phase flow: (angle', momentum').
std::pair<double, double> phase_rhs(const RotatorState &s);

struct Trajectory {
    std::vector<double> t, angle, momentum;
    /// Set when the noncompact guard |q| > q_guard tripped: bracket of the crossing.
    std::optional<std::pair<double, double>> blowup;
};

inline constexpr double q_guard = 25.0;

/// Classical RK4 with step h (adjusted so that T is hit exactly). Noncompact runs
/// shrink the step so that q moves by at most 0.01 per step and stop at the guard.
Trajectory integrate_phase(const RotatorState &s0, double T, double h);

/// One step of the same scheme, for callers that march themselves.
RotatorState rk4_step(const RotatorState &s, double h);

/// Evolve to time s0.t + T with step <= h. Throws blow_up_detected past the guard.
RotatorState evolve_state(const RotatorState &s0, double T, double h);

struct LaxTrajectory {
    std::vector<double> t;
    std::vector<Mat2> L;
    std::vector<RotatorState> states;
};

/// RK4 on dL/dt = [L, M+] together with the phase flow.
LaxTrajectory integrate_lax(const RotatorState &s0, cplx lambda, double T, double h);

/// exp(t L) for traceless L: cosh(t mu) I + sinh(t mu)/mu L with mu^2 = -det L.
Mat2 matrix_exp(const Mat2 &L, double t);
Mat2 matrix_exp(const RotatorState &s0, cplx lambda, double t);

/// Period of L(t) (phi -> phi + pi) for the rotating compact top, 2 K(k) / w.
double rotation_period(double a, double E);

/// Modulus k^2 = 2 a^2 / (E + a^2) and frequency w = sqrt(2 (E + a^2)).
double modulus_ksq(double a, double E);
double frequency(double a, double E);

} // namespace spintop
