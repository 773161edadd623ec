#include "spintop/oracles.hpp"

#include <cmath>

namespace spintop::oracle {

cplx wp_lattice_sum(cplx u, cplx omega1, cplx omega2, int N)
{
    cplx sum = 1.0 / (u * u);
    for (int m = -N; m <= N; ++m) {
        for (int n = -N; n <= N; ++n) {
            if (m == 0 && n == 0) {
                continue;
            }
            const cplx w = 2.0 * (double(m) * omega1 + double(n) * omega2);
            const cplx d = u - w;
            sum += 1.0 / (d * d) - 1.0 / (w * w);
        }
    }
    return sum;
}

cplx wp_lattice(cplx u, cplx omega1, cplx omega2, int n0)
{
    // the square-truncation tail behaves like c2/N^2 + c3/N^3 + c4/N^4 + ...
    cplx p[4];
    for (int k = 0; k < 4; ++k) {
        p[k] = wp_lattice_sum(u, omega1, omega2, n0 << k);
    }
    for (int order = 2, len = 4; order <= 4; ++order, --len) {
        const double f = std::ldexp(1.0, order);
        for (int k = 0; k + 1 < len; ++k) {
            p[k] = (f * p[k + 1] - p[k]) / (f - 1.0);
        }
    }
    return p[0];
}

Mat2 expm_taylor(const Mat2 &M)
{
    const double nrm = M.cwiseAbs().rowwise().sum().maxCoeff();
    int s = 0;
    while (std::ldexp(nrm, -s) > 0.25) {
        ++s;
    }
    const Mat2 A = M * std::ldexp(1.0, -s);
    Mat2 term = Mat2::Identity(), acc = Mat2::Identity();
    for (int k = 1; k <= 24; ++k) {
        term = term * A / static_cast<double>(k);
        acc += term;
    }
    for (int k = 0; k < s; ++k) {
        acc = acc * acc;
    }
    return acc;
}

double amplitude(double u, double m)
{
    const double k = std::sqrt(m);
    const double K = std::comp_ellint_1(k);
    double phi = 0.5 * pi * u / K;
    for (int it = 0; it < 60; ++it) {
        // F(phi) for arbitrary real phi via quasi-periodicity F(phi + n pi) = F(phi) + 2 n K
        const double n = std::round(phi / pi);
        const double F = std::ellint_1(k, phi - n * pi) + 2.0 * n * K;
        const double sn = std::sin(phi);
        const double step = (F - u) * std::sqrt(1.0 - m * sn * sn);
        phi -= step;
        if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(phi))) {
            break;
        }
    }
    return phi;
}

namespace {

struct Reduced {
    double omega;  // sqrt(2 (H + a^2))
    double ksq;    // 2 a^2 / (H + a^2)
    double sigma;  // direction of motion
};

Reduced reduce(const RotatorState &s0)
{
    const double a2 = s0.a * s0.a;
    const double H = hamiltonian(s0);
    if (!(H > a2)) {
        throw Error(ErrorCode::regime_unsupported, "closed forms need H > a^2");
    }
    return {std::sqrt(2.0 * (H + a2)), 2.0 * a2 / (H + a2), s0.momentum < 0.0 ? -1.0 : 1.0};
}

double incomplete_F(double phi, double m)
{
    const double k = std::sqrt(m);
    const double n = std::round(phi / pi);
    return std::ellint_1(k, phi - n * pi) + 2.0 * n * std::comp_ellint_1(k);
}

} // namespace

double observable(const RotatorState &s0, double t)
{
    const Reduced r = reduce(s0);
    if (s0.variant == Variant::compact) {
        const double us = incomplete_F(s0.angle, r.ksq);
        const double sn = std::sin(amplitude(us + r.sigma * r.omega * t, r.ksq));
        return sn * sn;
    }
    const double m = 1.0 - r.ksq;
    const double us = incomplete_F(std::atan(std::sinh(s0.angle)), m);
    const double sc = std::tan(amplitude(us + r.sigma * r.omega * t, m));
    return sc * sc;
}

double blowup_time(const RotatorState &s0)
{
    if (s0.variant != Variant::noncompact) {
        throw Error(ErrorCode::invalid_argument, "only the noncompact rotator blows up");
    }
    const Reduced r = reduce(s0);
    const double m = 1.0 - r.ksq;
    const double us = incomplete_F(std::atan(std::sinh(s0.angle)), m);
    const double K = std::comp_ellint_1(std::sqrt(m));
    return (K - r.sigma * us) / r.omega;
}

} // namespace spintop::oracle
