#include "spintop/lax_dynamics.hpp"

#include <cmath>

#include "spintop/special_functions.hpp"

namespace spintop {

namespace {

constexpr cplx I{0.0, 1.0};

void check_lambda(cplx lambda)
{
    if (lambda == 0.0) {
        throw Error(ErrorCode::lambda_zero, "Lax matrix has a pole at lambda = 0");
    }
}

Mat2 mplus(const RotatorState &s, cplx lambda)
{
    const cplx l = (s.variant == Variant::compact) ? cplx(s.momentum) : I * s.momentum;
    Mat2 M;
    M << s.a * lambda, l, -l, -s.a * lambda;
    return M;
}

Mat2 commutator(const Mat2 &A, const Mat2 &B) { return A * B - B * A; }

} // namespace

double modulus_ksq(double a, double E) { return 2.0 * a * a / (E + a * a); }

double frequency(double a, double E) { return std::sqrt(2.0 * (E + a * a)); }

RotatorState initial_state(Variant v, double a, double E)
{
    if (!(a > 0.0)) {
        throw Error(ErrorCode::invalid_argument, "a must be positive");
    }
    if (!(E + a * a >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "E + a^2 must be non-negative");
    }
    return {v, a, 0.0, frequency(a, E), 0.0};
}

Mat2 s_matrix(const RotatorState &s)
{
    const double a = s.a;
    Mat2 S;
    if (s.variant == Variant::compact) {
        const double c = std::cos(2.0 * s.angle), sn = std::sin(2.0 * s.angle);
        S << a * c, a * sn, a * sn, -a * c;
    } else {
        const double c = std::cosh(2.0 * s.angle), sh = std::sinh(2.0 * s.angle);
        S << -a * c, -I * a * sh, -I * a * sh, a * c;
    }
    return S;
}

LaxSample build_lax(const RotatorState &s, cplx lambda)
{
    check_lambda(lambda);
    const cplx inv = 1.0 / lambda;
    LaxSample out;
    out.lambda = lambda;
    out.Mplus = mplus(s, lambda);
    out.Mminus = -inv * s_matrix(s);
    out.L = out.Mplus - out.Mminus;
    return out;
}

double hamiltonian(const RotatorState &s)
{
    const double a2 = s.a * s.a;
    if (s.variant == Variant::compact) {
        return 0.5 * s.momentum * s.momentum - a2 * std::cos(2.0 * s.angle);
    }
    return 0.5 * s.momentum * s.momentum - a2 * std::cosh(2.0 * s.angle);
}

double hamiltonian_from_lax(const RotatorState &s)
{
    constexpr int n = 16;
    cplx c0 = 0.0;
    for (int k = 0; k < n; ++k) {
        const Mat2 L = build_lax(s, std::polar(1.0, 2.0 * pi * (k + 0.5) / n)).L;
        c0 += (L * L).trace();
    }
    c0 /= static_cast<double>(n);
    const double sign = (s.variant == Variant::compact) ? -0.25 : 0.25;
    return sign * c0.real();
}

std::pair<double, double> phase_rhs(const RotatorState &s)
{
    const double a2 = s.a * s.a;
    const double force = (s.variant == Variant::compact) ? -2.0 * a2 * std::sin(2.0 * s.angle)
                                                         : 2.0 * a2 * std::sinh(2.0 * s.angle);
    return {s.momentum, force};
}

RotatorState rk4_step(const RotatorState &s, double h)
{
    auto shifted = [&](double dq, double dp) {
        RotatorState r = s;
        r.angle += dq;
        r.momentum += dp;
        return r;
    };
    const auto k1 = phase_rhs(s);
    const auto k2 = phase_rhs(shifted(0.5 * h * k1.first, 0.5 * h * k1.second));
    const auto k3 = phase_rhs(shifted(0.5 * h * k2.first, 0.5 * h * k2.second));
    const auto k4 = phase_rhs(shifted(h * k3.first, h * k3.second));
    RotatorState r = s;
    r.angle += h / 6.0 * (k1.first + 2.0 * k2.first + 2.0 * k3.first + k4.first);
    r.momentum += h / 6.0 * (k1.second + 2.0 * k2.second + 2.0 * k3.second + k4.second);
    r.t += h;
    return r;
}

namespace {

double step_for(const RotatorState &s, double h)
{
    if (s.variant == Variant::compact) {
        return h;
    }
    const double rate = std::abs(s.momentum);
    return rate * h > 0.01 ? 0.01 / rate : h;
}

} // namespace

Trajectory integrate_phase(const RotatorState &s0, double T, double h)
{
    if (!(h > 0.0) || !(T >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "require h > 0 and T >= 0");
    }
    Trajectory out;
    auto record = [&](const RotatorState &s) {
        out.t.push_back(s.t);
        out.angle.push_back(s.angle);
        out.momentum.push_back(s.momentum);
    };
    RotatorState s = s0;
    record(s);
    if (s0.variant == Variant::compact) {
        const long n = std::max(1L, static_cast<long>(std::ceil(T / h - 1e-9)));
        const double he = T / n;
        for (long k = 1; k <= n; ++k) {
            s = rk4_step(s, he);
            s.t = s0.t + k * he;
            record(s);
        }
        return out;
    }
    const double t_end = s0.t + T;
    while (s.t < t_end) {
        const double step = std::min(step_for(s, h), t_end - s.t);
        const RotatorState next = rk4_step(s, step);
        if (std::abs(next.angle) > q_guard || !std::isfinite(next.angle)) {
            out.blowup = std::make_pair(s.t, next.t);
            return out;
        }
        s = next;
        if (t_end - s.t < 1e-14 * std::max(1.0, std::abs(t_end))) {
            s.t = t_end;
        }
        record(s);
    }
    return out;
}

RotatorState evolve_state(const RotatorState &s0, double T, double h)
{
    if (T == 0.0) {
        return s0;
    }
    const Trajectory tr = integrate_phase(s0, T, h);
    if (tr.blowup) {
        throw Error(ErrorCode::blow_up_detected, "trajectory diverges before the requested time");
    }
    RotatorState s = s0;
    s.t = tr.t.back();
    s.angle = tr.angle.back();
    s.momentum = tr.momentum.back();
    return s;
}

LaxTrajectory integrate_lax(const RotatorState &s0, cplx lambda, double T, double h)
{
    check_lambda(lambda);
    if (!(h > 0.0) || !(T >= 0.0)) {
        throw Error(ErrorCode::invalid_argument, "require h > 0 and T >= 0");
    }
    const long n = std::max(1L, static_cast<long>(std::ceil(T / h - 1e-9)));
    const double he = T / n;
    LaxTrajectory out;
    RotatorState s = s0;
    Mat2 L = build_lax(s0, lambda).L;
    out.t.push_back(s.t);
    out.L.push_back(L);
    out.states.push_back(s);

    auto stage = [&](const RotatorState &st, const Mat2 &Lx) { return commutator(Lx, mplus(st, lambda)); };
    auto shifted = [&](double dq, double dp) {
        RotatorState r = s;
        r.angle += dq;
        r.momentum += dp;
        return r;
    };
    for (long k = 1; k <= n; ++k) {
        const auto p1 = phase_rhs(s);
        const Mat2 k1 = stage(s, L);
        const RotatorState s2 = shifted(0.5 * he * p1.first, 0.5 * he * p1.second);
        const auto p2 = phase_rhs(s2);
        const Mat2 k2 = stage(s2, L + 0.5 * he * k1);
        const RotatorState s3 = shifted(0.5 * he * p2.first, 0.5 * he * p2.second);
        const auto p3 = phase_rhs(s3);
        const Mat2 k3 = stage(s3, L + 0.5 * he * k2);
        const RotatorState s4 = shifted(he * p3.first, he * p3.second);
        const auto p4 = phase_rhs(s4);
        const Mat2 k4 = stage(s4, L + he * k3);
        L += he / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        s.angle += he / 6.0 * (p1.first + 2.0 * p2.first + 2.0 * p3.first + p4.first);
        s.momentum += he / 6.0 * (p1.second + 2.0 * p2.second + 2.0 * p3.second + p4.second);
        s.t = s0.t + k * he;
        out.t.push_back(s.t);
        out.L.push_back(L);
        out.states.push_back(s);
    }
    return out;
}

Mat2 matrix_exp(const Mat2 &L, double t)
{
    const cplx mu2 = -L.determinant();
    const cplx x2 = t * t * mu2;
    cplx ch, sh_over_mu;
    if (std::abs(x2) < 1e-12) {
        ch = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
        sh_over_mu = t * (1.0 + x2 / 6.0 + x2 * x2 / 120.0);
    } else {
        const cplx m = std::sqrt(mu2);
        ch = std::cosh(t * m);
        sh_over_mu = std::sinh(t * m) / m;
    }
    return ch * Mat2::Identity() + sh_over_mu * L;
}

Mat2 matrix_exp(const RotatorState &s0, cplx lambda, double t)
{
    return matrix_exp(build_lax(s0, lambda).L, t);
}

double rotation_period(double a, double E)
{
    if (!(E > a * a)) {
        throw Error(ErrorCode::regime_unsupported, "rotation period requires E > a^2");
    }
    return 2.0 * elliptic_K({modulus_ksq(a, E)}) / frequency(a, E);
}

} // namespace spintop
