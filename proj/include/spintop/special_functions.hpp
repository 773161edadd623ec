#pragma once

// Genus-1 theta functions, Weierstrass p, Jacobi sn and the elliptic
// integrals used by the spinning-top pipeline.
//
// Theta normalization: theta(z) = sum_n exp(B n^2 / 2 + z n) with B = 2*pi*i*tau,
// periodic under z -> z + 2*pi*i and quasi-periodic under z -> z + B.
// theta1(z) = exp(B/8 + z/2) * theta(z + pi*i + B/2) is odd and vanishes on the
// lattice 2*pi*i*Z + B*Z.

#include <optional>

#include "spintop/types.hpp"

namespace spintop {

inline constexpr double eps_theta = 1e-15;
inline constexpr double eps_pole = 1e-10;

class ThetaModulus
{
public:
    static ThetaModulus from_B(cplx B);
    static ThetaModulus from_tau(cplx tau);

    cplx B() const { return B_; }
    cplx tau() const { return B_ / two_pi_i; }

    /// z = z_red + n*B + 2*pi*i*m with z_red in the fundamental parallelogram
    /// centred at the origin.
    struct Reduced {
        cplx z;
        long n = 0;
        long m = 0;
    };
    Reduced reduce(cplx z) const;

    /// Distance from z to the nearest point of 2*pi*i*Z + B*Z.
    double lattice_distance(cplx z) const;

    /// Truncation order for the series at a reduced argument.
    int truncation(double re_z) const;

    cplx theta1_d1_at_zero() const { return d1_zero_; }
    cplx theta1_d3_at_zero() const { return d3_zero_; }

private:
    explicit ThetaModulus(cplx B);

    cplx B_;
    cplx d1_zero_;
    cplx d3_zero_;
};

cplx theta(cplx z, const ThetaModulus &m);
/// log theta(z) on some branch; never overflows for moderate lattice shifts.
cplx theta_log(cplx z, const ThetaModulus &m);

cplx theta1(cplx z, const ThetaModulus &m);
cplx theta1_log(cplx z, const ThetaModulus &m);

/// k-th derivative (k = 0..3) of the theta1 series summed directly, without
/// argument reduction. Intended for |Re z| of order |Re B|.
cplx theta1_series_derivative(cplx z, const ThetaModulus &m, int k);

/// order 1: theta1'/theta1; order 2: (log theta1)''; order 3: (log theta1)'''.
cplx theta1_dlog(cplx z, const ThetaModulus &m, int order);

/// |theta1| of the lattice-reduced argument, relative to |theta1'(0)|.
/// Behaves like the distance to the nearest zero.
double theta1_reduced_magnitude(cplx z, const ThetaModulus &m);

class WeierstrassLattice
{
public:
    /// Half periods; omega2 is negated if needed so that Im(omega2/omega1) > 0.
    WeierstrassLattice(cplx omega1, cplx omega2);

    cplx omega1() const { return omega1_; }
    cplx omega2() const { return omega2_; }
    cplx g2() const { return g2_; }
    cplx g3() const { return g3_; }
    /// p(omega1), p(omega1 + omega2), p(omega2).
    cplx e1() const { return e1_; }
    cplx e2() const { return e2_; }
    cplx e3() const { return e3_; }

    const ThetaModulus &modulus() const { return modulus_; }
    /// Maps u to the theta variable z = scale * u (2*omega1 -> 2*pi*i).
    cplx scale() const { return scale_; }
    double lattice_distance(cplx u) const;

private:
    cplx omega1_, omega2_;
    ThetaModulus modulus_;
    cplx scale_;
    cplx g2_, g3_, e1_, e2_, e3_;
};

cplx wp(cplx u, const WeierstrassLattice &lat);
cplx wp_prime(cplx u, const WeierstrassLattice &lat);

struct EllipticModulus {
    double ksq = 0.0;
};

struct JacobiTriple {
    double sn, cn, dn;
};

JacobiTriple jacobi_elliptic(double u, EllipticModulus k);
double jacobi_sn(double u, EllipticModulus k);
double elliptic_K(EllipticModulus k);

/// u0 = int dx / sqrt(4x(1-x)(k^-2-x)) over (0, inf) taken along the real axis
/// just above the branch points (compact), or
/// u0 = int dx / sqrt(4x(1+x)(k^-2+x)) over (eps_k, inf) (noncompact).
cplx u0_integral(EllipticModulus k, Variant variant);

} // namespace spintop
