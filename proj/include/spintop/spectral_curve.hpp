#pragma once

// Elliptic spectral curve w^2 = lambda^4 - (2E/a^2) lambda^2 + 1 of the SO(2) top,
// with mu = a w / lambda.
//
// All heavy lifting happens in "compact coordinates" lambda_c, where the cuts are
// [-l+, -l-] and [l-, l+] on the real axis. The noncompact curve
// mu^2 = a^2 lambda^2 + 2E + a^2 lambda^-2 is the same surface in the rotated
// coordinate lambda = rho * lambda_c with rho = i, and w = rho^2 w_c(lambda / rho).
//
// Sheet + is the determination with w ~ +lambda^2 at infinity. On the real axis
// of the compact chart, points on a cut take the value approached from above.

#include <optional>
#include <utility>
#include <vector>

#include "spintop/quadrature.hpp"
#include "spintop/special_functions.hpp"
#include "spintop/types.hpp"

namespace spintop {

inline constexpr double eps_branch = 1e-8;

enum class Marked { none, zero_plus, zero_minus, inf_plus, inf_minus };

const char *to_string(Marked m);

struct SurfacePoint {
    cplx lambda = 0.0;  // physical coordinate; unused for points at infinity
    Sheet sheet = Sheet::plus;
    Marked marked = Marked::none;

    bool at_infinity() const { return marked == Marked::inf_plus || marked == Marked::inf_minus; }
};

SurfacePoint point_at(cplx lambda, Sheet sheet);

struct CurveOptions {
    int a_cycle_vertices = 16;   // polygon approximating the a-cycle circle
    double a_cycle_scale = 1.0;  // radius multiplier (deformation checks)
    quad::Options quad{};
};

struct CurveData {
    Variant variant;
    double a;
    double E;
    double lminus;  // compact-chart branch points, 0 < l- < 1 < l+
    double lplus;
    cplx rho;       // lambda = rho * lambda_c

    cplx Acal;      // a-period of d lambda / w (physical chart)
    cplx Bcal;      // b-period
    cplx tau;
    cplx B;         // 2 pi i tau
    cplx alpha;     // 2 pi i / Acal
    cplx V;         // 2 a alpha
    bool b_flipped; // b-cycle reversed so that Im tau > 0
    double a_period_change; // last refinement change of the a-period quadrature

    ThetaModulus modulus;

    // Abel images of the marked points.
    cplx A0_plus, A0_minus, Ainf_plus, Ainf_minus;

    cplx alpha_c() const { return alpha / rho; }
    cplx to_compact(cplx lambda) const { return lambda / rho; }
    cplx from_compact(cplx lambda_c) const { return lambda_c * rho; }
    /// Compact-chart sheet of a physical marker at lambda = 0.
    SurfacePoint marked_point(Marked m) const;
    std::vector<cplx> branch_points_physical() const;
};

/// (l-, l+) with l+^2, l-^2 = (E +- sqrt(E^2 - a^4)) / a^2.
std::pair<double, double> branch_points(double a, double E);

CurveData build_curve(double a, double E, Variant variant = Variant::compact,
                      const CurveOptions &opt = {});

/// Sheet + value of w in the compact chart.
cplx w_plus_compact(cplx lambda_c, double lminus, double lplus);

/// w(p) in the physical chart.
cplx w_value(const SurfacePoint &p, const CurveData &c);

/// mu(p) = a w / lambda. Throws pole for marked points (lambda = 0 or infinity).
cplx mu(const SurfacePoint &p, const CurveData &c);

enum class Cycle { a, b };

/// Closed contour in the compact chart: consecutive segments between waypoints,
/// each traversed on the given sheet.
struct CyclePath {
    Cycle which;
    std::vector<cplx> waypoints;
    std::vector<Sheet> sheets;  // one per segment
};

CyclePath a_cycle(double lminus, double lplus, int vertices = 16, double scale = 1.0);
CyclePath b_cycle(double lminus, bool flipped = false);

/// Integral of d lambda_c / w_c over the path (compact chart), with sheet
/// continuity checked on every segment.
quad::Result period_compact(const CyclePath &path, double lminus, double lplus,
                            const quad::Options &opt = {});

/// Period of d lambda / w in the physical chart of c.
cplx period(const CurveData &c, const CyclePath &path);

/// Integral of d lambda_c / w+ along the straight segment z0 -> z1 of the compact
/// chart. Endpoint singularities at branch points are removed by substitution.
cplx segment_integral(cplx z0, cplx z1, double lminus, double lplus,
                      const quad::Options &opt = {});

/// Abel map A(p) = int_{l-}^{p} alpha d lambda / w along the canonical path.
cplx abel(const SurfacePoint &p, const CurveData &c);

struct Continued {
    SurfacePoint point;
    cplx value;  // Abel image accumulated along the path
};

/// Analytic continuation of the Abel map from start (with Abel image start_value)
/// through physical waypoints. Crossing a cut changes sheet.
Continued abel_continue(const SurfacePoint &start, cplx start_value,
                        const std::vector<cplx> &waypoints, const CurveData &c);

/// A point p with A(p) = z modulo the lattice: marked points and branch points
/// are matched directly, otherwise Newton iteration from a grid of starts.
std::optional<SurfacePoint> abel_inverse(cplx z, const CurveData &c);

/// Reduce a difference modulo the period lattice (2 pi i, B).
double lattice_distance(cplx z, const CurveData &c);

/// Second-kind Abelian integral as a function of the Abel image z.
cplx omega_sk(cplx z, const CurveData &c);
/// dOmega / dz.
cplx omega_sk_prime(cplx z, const CurveData &c);
cplx omega_sk(const SurfacePoint &p, const CurveData &c);

/// lim lambda Omega at 0+ (expected +a) and 0- (expected -a), extrapolated from
/// lambda = 1e-3 ... 1e-5.
std::pair<cplx, cplx> omega_residues(const CurveData &c);

/// Omega(z + period) - Omega(z) for the a- and b-cycles.
std::pair<cplx, cplx> omega_periods(const CurveData &c);

struct VelocityCheck {
    cplx V;              // 2 a alpha
    cplx V_residue;      // -sum of residues of mu omega at infinity
    cplx V_b_period;     // minus the b-period of dOmega
    double rel_residue;  // |V - V_residue| / |V|
    double rel_b_period;
};

/// V with its residue and b-period cross-checks. The residue uses a freshly
/// computed a-period. Throws identity_violation if the residue check exceeds tol.
VelocityCheck v_constant(const CurveData &c, double tol = 1e-8);

struct InfinityExpansion {
    cplx alpha_j;  // z_j = A(P_j) - A(p) = alpha_j zeta + O(zeta^2)
    cplx Omega0;
    cplx Omega1;
    double extrapolation_change;
};

/// Expansion at P_1 = inf+ (j = 1) or P_2 = inf- (j = 2) in zeta = 1/lambda.
InfinityExpansion expansion_at_infinity(int j, const CurveData &c);

/// Laurent coefficients from the closed form: Omega(Q_j) and -alpha_j Omega'(Q_j).
InfinityExpansion expansion_at_infinity_exact(int j, const CurveData &c);

} // namespace spintop
