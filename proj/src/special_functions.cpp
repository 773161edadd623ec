#include "spintop/special_functions.hpp"

#include <array>
#include <cmath>

#include "spintop/quadrature.hpp"

namespace spintop {

namespace {

constexpr double log_overflow = 700.0;
constexpr int max_truncation = 4000;

cplx checked_exp(cplx log_value, const char *what)
{
    if (!(log_value.real() < log_overflow)) {
        throw Error(ErrorCode::overflow, what);
    }
    return std::exp(log_value);
}

} // namespace

ThetaModulus::ThetaModulus(cplx B) : B_(B)
{
    if (!(B.real() < 0.0) || !std::isfinite(B.real()) || !std::isfinite(B.imag())) {
        throw Error(ErrorCode::modulus_invalid, "Im tau must be positive (Re B < 0)");
    }
    if (truncation(0.0) > max_truncation) {
        throw Error(ErrorCode::modulus_invalid, "Im tau too small for series evaluation");
    }
    d1_zero_ = theta1_series_derivative(0.0, *this, 1);
    d3_zero_ = theta1_series_derivative(0.0, *this, 3);
}

ThetaModulus ThetaModulus::from_B(cplx B) { return ThetaModulus(B); }

ThetaModulus ThetaModulus::from_tau(cplx tau) { return ThetaModulus(two_pi_i * tau); }

ThetaModulus::Reduced ThetaModulus::reduce(cplx z) const
{
    // z = 2*pi*i*u + B*v with real u, v.
    const double v = z.real() / B_.real();
    const double u = (z.imag() - v * B_.imag()) / (2.0 * pi);
    Reduced r;
    r.n = std::lround(v);
    r.m = std::lround(u);
    r.z = z - static_cast<double>(r.n) * B_ - static_cast<double>(r.m) * two_pi_i;
    return r;
}

double ThetaModulus::lattice_distance(cplx z) const
{
    const auto r = reduce(z);
    double best = std::abs(r.z);
    for (int dn = -1; dn <= 1; ++dn) {
        for (int dm = -1; dm <= 1; ++dm) {
            best = std::min(best, std::abs(r.z - static_cast<double>(dn) * B_
                                           - static_cast<double>(dm) * two_pi_i));
        }
    }
    return best;
}

int ThetaModulus::truncation(double re_z) const
{
    // Smallest N with Re(B) N^2 / 2 + |Re z| N below log(eps_theta), plus margin.
    const double b = -B_.real();
    const double x = std::abs(re_z) + 0.5 * b;
    const double L = -std::log(eps_theta) + 4.0;
    const double n = (x + std::sqrt(x * x + 2.0 * b * L)) / b;
    if (!std::isfinite(n) || n > 1e9) {
        return max_truncation + 1;
    }
    return static_cast<int>(std::ceil(n)) + 1;
}

cplx theta_log(cplx z, const ThetaModulus &mod)
{
    const auto r = mod.reduce(z);
    const cplx B = mod.B();
    const int N = mod.truncation(r.z.real());
    cplx sum = 0.0;
    for (int n = -N; n <= N; ++n) {
        const double dn = n;
        sum += std::exp(0.5 * B * dn * dn + r.z * dn);
    }
    const double n = static_cast<double>(r.n);
    return std::log(sum) - 0.5 * B * n * n - r.z * n;
}

cplx theta(cplx z, const ThetaModulus &m) { return checked_exp(theta_log(z, m), "theta"); }

cplx theta1_series_derivative(cplx z, const ThetaModulus &mod, int k)
{
    const cplx B = mod.B();
    const int N = mod.truncation(z.real());
    cplx sum = 0.0;
    for (int n = -N - 1; n <= N; ++n) {
        const double h = n + 0.5;
        const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
        sum += sgn * std::pow(h, k) * std::exp(0.5 * B * h * h + h * z);
    }
    return sum;
}

cplx theta1_log(cplx z, const ThetaModulus &mod)
{
    const auto r = mod.reduce(z);
    const cplx value = theta1_series_derivative(r.z, mod, 0);
    const double n = static_cast<double>(r.n);
    const double m = static_cast<double>(r.m);
    return std::log(value) + cplx(0.0, pi * (n + m)) - n * r.z - 0.5 * n * n * mod.B();
}

cplx theta1(cplx z, const ThetaModulus &m) { return checked_exp(theta1_log(z, m), "theta1"); }

double theta1_reduced_magnitude(cplx z, const ThetaModulus &mod)
{
    const auto r = mod.reduce(z);
    return std::abs(theta1_series_derivative(r.z, mod, 0)) / std::abs(mod.theta1_d1_at_zero());
}

cplx theta1_dlog(cplx z, const ThetaModulus &mod, int order)
{
    if (order < 1 || order > 3) {
        throw Error(ErrorCode::invalid_argument, "theta1_dlog order must be 1, 2 or 3");
    }
    const auto r = mod.reduce(z);
    std::array<cplx, 4> d{};
    for (int k = 0; k <= order; ++k) {
        d[k] = theta1_series_derivative(r.z, mod, k);
    }
    if (std::abs(d[0]) < eps_pole * std::abs(mod.theta1_d1_at_zero())) {
        throw Error(ErrorCode::pole, "theta1 vanishes at lattice point");
    }
    const cplx f1 = d[1] / d[0];
    switch (order) {
    case 1: return f1 - static_cast<double>(r.n);
    case 2: return d[2] / d[0] - f1 * f1;
    default: return d[3] / d[0] - 3.0 * d[2] * d[1] / (d[0] * d[0]) + 2.0 * f1 * f1 * f1;
    }
}

WeierstrassLattice::WeierstrassLattice(cplx omega1, cplx omega2)
    : omega1_(omega1),
      omega2_((omega2 / omega1).imag() < 0.0 ? -omega2 : omega2),
      modulus_(ThetaModulus::from_tau(omega2_ / omega1_)),
      scale_(cplx(0.0, pi) / omega1_)
{
    e1_ = wp(omega1_, *this);
    e2_ = wp(omega1_ + omega2_, *this);
    e3_ = wp(omega2_, *this);
    g2_ = 2.0 * (e1_ * e1_ + e2_ * e2_ + e3_ * e3_);
    g3_ = 4.0 * e1_ * e2_ * e3_;
}

double WeierstrassLattice::lattice_distance(cplx u) const
{
    return modulus_.lattice_distance(scale_ * u) / std::abs(scale_);
}

cplx wp(cplx u, const WeierstrassLattice &lat)
{
    if (lat.lattice_distance(u) < eps_pole) {
        throw Error(ErrorCode::pole, "wp evaluated on a lattice point");
    }
    const auto &mod = lat.modulus();
    const cplx s = lat.scale();
    // (log theta1)'' = -1/z^2 + theta1'''(0) / (3 theta1'(0)) + O(z^2)
    const cplx c = mod.theta1_d3_at_zero() / (3.0 * mod.theta1_d1_at_zero());
    return s * s * (c - theta1_dlog(s * u, mod, 2));
}

cplx wp_prime(cplx u, const WeierstrassLattice &lat)
{
    if (lat.lattice_distance(u) < eps_pole) {
        throw Error(ErrorCode::pole, "wp' evaluated on a lattice point");
    }
    const cplx s = lat.scale();
    return -s * s * s * theta1_dlog(s * u, lat.modulus(), 3);
}

namespace {

void check_modulus(EllipticModulus k)
{
    if (!(k.ksq >= 0.0 && k.ksq < 1.0)) {
        throw Error(ErrorCode::modulus_out_of_range, "require 0 <= k^2 < 1");
    }
}

} // namespace

JacobiTriple jacobi_elliptic(double u, EllipticModulus k)
{
    check_modulus(k);
    double emc = 1.0 - k.ksq;
    if (emc == 1.0) {
        return {std::sin(u), std::cos(u), 1.0};
    }
    // Descending Landen / AGM scale.
    constexpr double ca = 1e-9;
    std::array<double, 16> em{}, en{};
    double a = 1.0, c = 1.0, dn = 1.0;
    int l = 0;
    for (int i = 0; i < 16; ++i) {
        l = i;
        em[i] = a;
        emc = std::sqrt(emc);
        en[i] = emc;
        c = 0.5 * (a + emc);
        if (std::abs(a - emc) <= ca * a) {
            break;
        }
        emc *= a;
        a = c;
    }
    u *= c;
    double sn = std::sin(u);
    double cn = std::cos(u);
    if (sn != 0.0) {
        a = cn / sn;
        c *= a;
        for (int ii = l; ii >= 0; --ii) {
            const double b = em[ii];
            a *= c;
            c *= dn;
            dn = (en[ii] + a) / (b + a);
            a = c / b;
        }
        a = 1.0 / std::sqrt(c * c + 1.0);
        sn = (sn >= 0.0) ? a : -a;
        cn = c * sn;
    }
    return {sn, cn, dn};
}

double jacobi_sn(double u, EllipticModulus k) { return jacobi_elliptic(u, k).sn; }

double elliptic_K(EllipticModulus k)
{
    check_modulus(k);
    double a = 1.0;
    double b = std::sqrt(1.0 - k.ksq);
    for (int i = 0; i < 64 && std::abs(a - b) > 1e-16 * a; ++i) {
        const double an = 0.5 * (a + b);
        b = std::sqrt(a * b);
        a = an;
    }
    return pi / (2.0 * a);
}

namespace {

// sqrt(y + i0 * sign) continued from above the real x axis; y = c - x.
cplx sqrt_from_above(double y) { return y >= 0.0 ? cplx(std::sqrt(y), 0.0) : cplx(0.0, -std::sqrt(-y)); }

template <class F>
cplx integrate_both_singular(F &&f, double lo, double hi)
{
    const double d = hi - lo;
    auto g = [&](double s) {
        const double x = lo + d * s * s * (3.0 - 2.0 * s);
        return f(x) * (d * 6.0 * s * (1.0 - s));
    };
    return quad::integrate(g).value;
}

template <class F>
cplx integrate_start_singular(F &&f, double lo, double hi)
{
    const double d = hi - lo;
    auto g = [&](double s) { return f(lo + d * s * s) * (2.0 * d * s); };
    return quad::integrate(g).value;
}

// Integral over [lo, inf) of an integrand decaying like x^{-3/2}.
template <class F>
cplx integrate_tail(F &&f, double lo)
{
    auto g = [&](double s) { return f(lo / (s * s)) * (2.0 * lo / (s * s * s)); };
    return quad::integrate(g).value;
}

} // namespace

cplx u0_integral(EllipticModulus k, Variant variant)
{
    if (variant == Variant::compact) {
        check_modulus(k);
        if (k.ksq == 0.0) {
            throw Error(ErrorCode::modulus_out_of_range, "k^2 = 0 has no finite u0");
        }
        const double kinv = 1.0 / k.ksq;
        auto f = [kinv](double x) {
            return 1.0 / (2.0 * std::sqrt(x) * sqrt_from_above(1.0 - x) * sqrt_from_above(kinv - x));
        };
        return integrate_both_singular(f, 0.0, 1.0) + integrate_both_singular(f, 1.0, kinv)
               + integrate_start_singular(f, kinv, kinv + 1.0) + integrate_tail(f, kinv + 1.0);
    }
    if (k.ksq == 0.0 || !std::isfinite(k.ksq)) {
        throw Error(ErrorCode::modulus_out_of_range, "noncompact u0 requires k^2 != 0");
    }
    const double kinv = 1.0 / k.ksq;
    const double lo = k.ksq > 0.0 ? 0.0 : -kinv;
    auto f = [kinv](double x) {
        return cplx(1.0 / (2.0 * std::sqrt(x * (1.0 + x) * (kinv + x))), 0.0);
    };
    return integrate_start_singular(f, lo, lo + 1.0) + integrate_tail(f, lo + 1.0);
}

} // namespace spintop
