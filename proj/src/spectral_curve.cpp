#include "spintop/spectral_curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace spintop {

namespace {

constexpr cplx I{0.0, 1.0};

bool near(cplx z, cplx e, double scale) { return std::abs(z - e) <= 1e-12 * scale; }

std::array<cplx, 4> branch_set(double lm, double lp) { return {lm, -lm, lp, -lp}; }

bool is_branch(cplx z, double lm, double lp)
{
    for (cplx e : branch_set(lm, lp)) {
        if (near(z, e, lp)) {
            return true;
        }
    }
    return false;
}

double segment_distance(cplx p, cplx z0, cplx z1)
{
    const cplx d = z1 - z0;
    const double len2 = std::norm(d);
    if (len2 == 0.0) {
        return std::abs(p - z0);
    }
    const double s = std::clamp(((p - z0) * std::conj(d)).real() / len2, 0.0, 1.0);
    return std::abs(p - (z0 + s * d));
}

void check_sheet_continuity(cplx z0, cplx z1, double lm, double lp)
{
    constexpr int samples = 128;
    cplx prev = w_plus_compact(z0 + (z1 - z0) * (0.5 / samples), lm, lp);
    for (int k = 1; k < samples; ++k) {
        const cplx cur = w_plus_compact(z0 + (z1 - z0) * ((k + 0.5) / samples), lm, lp);
        if (std::abs(cur - prev) > std::abs(cur + prev)) {
            throw Error(ErrorCode::sheet_tracking_failure, "w changes sign along a segment");
        }
        prev = cur;
    }
}

quad::Result segment_result(cplx z0, cplx z1, double lm, double lp, const quad::Options &opt)
{
    if (z0 == z1) {
        return {0.0, 0, 0.0};
    }
    check_sheet_continuity(z0, z1, lm, lp);
    const bool s0 = is_branch(z0, lm, lp);
    const bool s1 = is_branch(z1, lm, lp);
    const cplx d = z1 - z0;
    auto f = [&](double s) {
        double g = s, gp = 1.0;
        if (s0 && s1) {
            g = s * s * (3.0 - 2.0 * s);
            gp = 6.0 * s * (1.0 - s);
        } else if (s0) {
            g = s * s;
            gp = 2.0 * s;
        } else if (s1) {
            g = 1.0 - (1.0 - s) * (1.0 - s);
            gp = 2.0 * (1.0 - s);
        }
        return d * gp / w_plus_compact(z0 + d * g, lm, lp);
    };
    return quad::integrate(f, opt);
}

// int d zeta / r(zeta) along a straight segment, r = sqrt(1 - l+^2 z^2) sqrt(1 - l-^2 z^2).
cplx zeta_integral(cplx z0, cplx z1, double lm, double lp)
{
    const cplx d = z1 - z0;
    auto f = [&](double s) {
        const cplx z = z0 + d * s;
        return d / (std::sqrt(1.0 - lp * lp * z * z) * std::sqrt(1.0 - lm * lm * z * z));
    };
    return quad::integrate(f).value;
}

// int_{l-}^{inf} d lambda / w+ through i l+.
cplx infinity_integral(double lm, double lp)
{
    return segment_integral(lm, I * lp, lm, lp) + zeta_integral(0.0, 1.0 / (I * lp), lm, lp);
}

// int_{l-}^{x} d lambda / w+ along the canonical path (compact chart).
cplx canonical_integral(cplx x, double lm, double lp)
{
    if (near(x, lm, lp)) {
        return 0.0;
    }
    if (std::abs(x) > 4.0 * lp) {
        return infinity_integral(lm, lp) - zeta_integral(0.0, 1.0 / x, lm, lp);
    }
    const double hop = 0.25 * std::min(lm, lp - lm);
    const cplx way = (x.imag() >= 0.0 ? I : -I) * lp;
    auto route = [&](cplx e) -> cplx {
        if (e == cplx(-lm)) {
            return segment_integral(lm, e, lm, lp);  // across the gap
        }
        return segment_integral(lm, way, lm, lp) + segment_integral(way, e, lm, lp);
    };
    for (cplx e : {cplx(-lm), cplx(lp), cplx(-lp)}) {
        if (std::abs(x - e) < hop) {
            return route(e) + segment_integral(e, x, lm, lp);
        }
    }
    if (x.imag() == 0.0 && std::abs(x.real()) > lm) {
        return segment_integral(lm, I * lp, lm, lp) + segment_integral(I * lp, x, lm, lp);
    }
    for (cplx e : {cplx(-lm), cplx(lp), cplx(-lp)}) {
        if (segment_distance(e, lm, x) < hop) {
            return segment_integral(lm, way, lm, lp) + segment_integral(way, x, lm, lp);
        }
    }
    return segment_integral(lm, x, lm, lp);
}

double sheet_sign_of_zero_plus(cplx rho)
{
    // physical w(0+) = +1 while w+_c(0) = -1.
    return -1.0 / (rho * rho).real();
}

} // namespace

const char *to_string(Marked m)
{
    switch (m) {
    case Marked::none: return "none";
    case Marked::zero_plus: return "0+";
    case Marked::zero_minus: return "0-";
    case Marked::inf_plus: return "inf+";
    case Marked::inf_minus: return "inf-";
    }
    return "?";
}

SurfacePoint point_at(cplx lambda, Sheet sheet) { return {lambda, sheet, Marked::none}; }

SurfacePoint CurveData::marked_point(Marked m) const
{
    switch (m) {
    case Marked::zero_plus:
    case Marked::zero_minus: {
        const double s = sheet_sign_of_zero_plus(rho) * (m == Marked::zero_plus ? 1.0 : -1.0);
        return {0.0, s > 0 ? Sheet::plus : Sheet::minus, m};
    }
    case Marked::inf_plus: return {0.0, Sheet::plus, m};
    case Marked::inf_minus: return {0.0, Sheet::minus, m};
    case Marked::none: break;
    }
    throw Error(ErrorCode::invalid_argument, "not a marked point");
}

std::vector<cplx> CurveData::branch_points_physical() const
{
    std::vector<cplx> out;
    for (cplx e : branch_set(lminus, lplus)) {
        out.push_back(from_compact(e));
    }
    return out;
}

std::pair<double, double> branch_points(double a, double E)
{
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(E)) {
        throw Error(ErrorCode::invalid_argument, "require finite a > 0 and finite E");
    }
    const double e = E / (a * a);
    if (!(e > 1.0)) {
        throw Error(ErrorCode::regime_unsupported, "theta pipeline requires E > a^2");
    }
    const double s = std::sqrt((e - 1.0) * (e + 1.0));
    const double lp = std::sqrt(e + s);
    // l- = 1 / l+ avoids cancellation in e - s.
    return {1.0 / lp, lp};
}

cplx w_plus_compact(cplx lambda, double lm, double lp)
{
    if (lambda.imag() == 0.0) {
        const double x = lambda.real();
        const double x2 = x * x;
        const double ax = std::abs(x);
        if (ax <= lm) {
            return -std::sqrt((lp * lp - x2) * (lm * lm - x2));
        }
        if (ax >= lp) {
            return std::sqrt((x2 - lp * lp) * (x2 - lm * lm));
        }
        return cplx(0.0, std::copysign(std::sqrt((lp * lp - x2) * (x2 - lm * lm)), x));
    }
    const cplx inv = 1.0 / (lambda * lambda);
    return lambda * lambda * std::sqrt(1.0 - lp * lp * inv) * std::sqrt(1.0 - lm * lm * inv);
}

cplx w_value(const SurfacePoint &p, const CurveData &c)
{
    if (p.at_infinity()) {
        throw Error(ErrorCode::pole, "w has a double pole at infinity");
    }
    const cplx lc = (p.marked == Marked::none) ? c.to_compact(p.lambda) : cplx(0.0);
    const SurfacePoint q = (p.marked == Marked::none) ? p : c.marked_point(p.marked);
    return c.rho * c.rho * sign_of(q.sheet) * w_plus_compact(lc, c.lminus, c.lplus);
}

cplx mu(const SurfacePoint &p, const CurveData &c)
{
    if (p.marked != Marked::none || p.lambda == 0.0) {
        throw Error(ErrorCode::pole, "mu has a pole at 0 and infinity");
    }
    return c.a * w_value(p, c) / p.lambda;
}

CyclePath a_cycle(double lm, double lp, int vertices, double scale)
{
    if (vertices < 8) {
        throw Error(ErrorCode::invalid_argument, "a-cycle needs at least 8 vertices");
    }
    const double r = 0.75 * (lp - 0.5 * lm) * scale;
    const cplx centre = -0.5 * lm - r;
    CyclePath path{Cycle::a, {}, {}};
    for (int k = 0; k <= vertices; ++k) {
        const double th = 2.0 * pi * (k % vertices) / vertices;
        path.waypoints.push_back(centre + r * std::polar(1.0, th));
    }
    path.sheets.assign(vertices, Sheet::plus);
    return path;
}

CyclePath b_cycle(double lm, bool flipped)
{
    const double s = flipped ? -1.0 : 1.0;
    return {Cycle::b, {-s * lm, s * lm, -s * lm}, {Sheet::plus, Sheet::minus}};
}

cplx segment_integral(cplx z0, cplx z1, double lm, double lp, const quad::Options &opt)
{
    return segment_result(z0, z1, lm, lp, opt).value;
}

quad::Result period_compact(const CyclePath &path, double lm, double lp, const quad::Options &opt)
{
    if (path.waypoints.size() != path.sheets.size() + 1) {
        throw Error(ErrorCode::invalid_argument, "cycle path needs one sheet per segment");
    }
    for (cplx z : path.waypoints) {
        if (!is_branch(z, lm, lp)) {
            for (cplx e : branch_set(lm, lp)) {
                if (std::abs(z - e) < eps_branch) {
                    throw Error(ErrorCode::path_failure, "cycle passes too close to a branch point");
                }
            }
        }
    }
    quad::Result total{0.0, 0, 0.0};
    for (std::size_t k = 0; k < path.sheets.size(); ++k) {
        const auto r = segment_result(path.waypoints[k], path.waypoints[k + 1], lm, lp, opt);
        total.value += sign_of(path.sheets[k]) * r.value;
        total.panels = std::max(total.panels, r.panels);
        total.last_change = std::max(total.last_change, r.last_change);
    }
    return total;
}

cplx period(const CurveData &c, const CyclePath &path)
{
    return period_compact(path, c.lminus, c.lplus).value / c.rho;
}

CurveData build_curve(double a, double E, Variant variant, const CurveOptions &opt)
{
    const auto [lm, lp] = branch_points(a, E);
    const cplx rho = (variant == Variant::compact) ? cplx(1.0) : I;

    const auto ares = period_compact(a_cycle(lm, lp, opt.a_cycle_vertices, opt.a_cycle_scale), lm,
                                     lp, opt.quad);
    const cplx Ac = ares.value;
    cplx Bc = period_compact(b_cycle(lm), lm, lp, opt.quad).value;
    cplx tau = Bc / Ac;
    const bool flipped = tau.imag() < 0.0;
    if (flipped) {
        Bc = -Bc;
        tau = -tau;
    }
    if (!(tau.imag() > 0.0)) {
        throw Error(ErrorCode::modulus_invalid, "degenerate period ratio");
    }
    const cplx alpha_c = two_pi_i / Ac;
    const cplx alpha = rho * alpha_c;

    const cplx i_zero = canonical_integral(0.0, lm, lp);
    const cplx i_inf = infinity_integral(lm, lp);
    const double s0 = sheet_sign_of_zero_plus(rho);

    return CurveData{
        .variant = variant,
        .a = a,
        .E = E,
        .lminus = lm,
        .lplus = lp,
        .rho = rho,
        .Acal = Ac / rho,
        .Bcal = Bc / rho,
        .tau = tau,
        .B = two_pi_i * tau,
        .alpha = alpha,
        .V = 2.0 * a * alpha,
        .b_flipped = flipped,
        .a_period_change = ares.last_change / std::abs(Ac),
        .modulus = ThetaModulus::from_tau(tau),
        .A0_plus = s0 * alpha_c * i_zero,
        .A0_minus = -s0 * alpha_c * i_zero,
        .Ainf_plus = alpha_c * i_inf,
        .Ainf_minus = -alpha_c * i_inf,
    };
}

cplx abel(const SurfacePoint &p, const CurveData &c)
{
    switch (p.marked) {
    case Marked::zero_plus: return c.A0_plus;
    case Marked::zero_minus: return c.A0_minus;
    case Marked::inf_plus: return c.Ainf_plus;
    case Marked::inf_minus: return c.Ainf_minus;
    case Marked::none: break;
    }
    const cplx x = c.to_compact(p.lambda);
    for (cplx e : branch_set(c.lminus, c.lplus)) {
        if (!near(x, e, c.lplus) && std::abs(x - e) < eps_branch) {
            throw Error(ErrorCode::branch_point_collision, "Abel map evaluated at a branch point");
        }
    }
    return sign_of(p.sheet) * c.alpha_c() * canonical_integral(x, c.lminus, c.lplus);
}

Continued abel_continue(const SurfacePoint &start, cplx start_value,
                        const std::vector<cplx> &waypoints, const CurveData &c)
{
    if (start.marked != Marked::none) {
        throw Error(ErrorCode::invalid_argument, "continuation must start at a finite point");
    }
    const double lm = c.lminus, lp = c.lplus;
    auto on_cut = [&](double x) { return std::abs(x) > lm && std::abs(x) < lp; };
    auto check_clear = [&](cplx z) {
        for (cplx e : branch_set(lm, lp)) {
            if (std::abs(z - e) < eps_branch) {
                throw Error(ErrorCode::branch_point_collision, "continuation hits a branch point");
            }
        }
    };

    cplx cur = c.to_compact(start.lambda);
    double sigma = sign_of(start.sheet);
    cplx value = start_value;
    const cplx ac = c.alpha_c();

    auto leg = [&](cplx from, cplx to) {
        // from and to lie in one closed half plane
        const bool from_axis = from.imag() == 0.0;
        const bool to_axis = to.imag() == 0.0;
        if (from_axis && to_axis) {
            if (on_cut(0.5 * (from.real() + to.real()))) {
                throw Error(ErrorCode::path_failure, "continuation runs along a cut");
            }
        } else if (from_axis && to.imag() < 0.0 && on_cut(from.real())) {
            sigma = -sigma;  // leave a cut point downward
        }
        value += sigma * ac * segment_integral(from, to, lm, lp);
        if (to_axis && !from_axis && from.imag() < 0.0 && on_cut(to.real())) {
            sigma = -sigma;  // label cut points by the upper side
        }
    };

    for (cplx target_phys : waypoints) {
        const cplx target = c.to_compact(target_phys);
        check_clear(target);
        if (cur.imag() * target.imag() < 0.0) {
            const double s = cur.imag() / (cur.imag() - target.imag());
            const cplx x(cur.real() + s * (target.real() - cur.real()), 0.0);
            check_clear(x);
            leg(cur, x);
            cur = x;
        }
        leg(cur, target);
        cur = target;
    }
    return {point_at(c.from_compact(cur), sigma > 0 ? Sheet::plus : Sheet::minus), value};
}

double lattice_distance(cplx z, const CurveData &c) { return c.modulus.lattice_distance(z); }

std::optional<SurfacePoint> abel_inverse(cplx z, const CurveData &c)
{
    constexpr double tol = 1e-11;
    for (Marked m : {Marked::zero_plus, Marked::zero_minus, Marked::inf_plus, Marked::inf_minus}) {
        if (lattice_distance(z - abel(c.marked_point(m), c), c) < tol) {
            return c.marked_point(m);
        }
    }
    const double lm = c.lminus, lp = c.lplus;
    for (cplx e : branch_set(lm, lp)) {
        const SurfacePoint p = point_at(c.from_compact(e), Sheet::plus);
        if (lattice_distance(z - abel(p, c), c) < tol) {
            return p;
        }
    }
    const cplx ac = c.alpha_c();
    auto residual = [&](cplx x, double sigma) {
        return c.modulus.reduce(sigma * ac * canonical_integral(x, lm, lp) - z).z;
    };
    auto on_cut = [&](double x) { return std::abs(x) > lm && std::abs(x) < lp; };

    cplx best_x = 0.0;
    double best_sigma = 1.0;
    double best = std::numeric_limits<double>::infinity();
    for (double rad : {0.5 * lm, 1.0, 0.5 * (lm + lp), 2.0 * lp}) {
        for (int k = 0; k < 8; ++k) {
            const cplx x = rad * std::polar(1.0, 2.0 * pi * (k + 0.5) / 8.0);
            for (double sigma : {1.0, -1.0}) {
                const double r = std::abs(residual(x, sigma));
                if (r < best) {
                    best = r;
                    best_x = x;
                    best_sigma = sigma;
                }
            }
        }
    }
    cplx x = best_x;
    double sigma = best_sigma;
    for (int it = 0; it < 60; ++it) {
        const cplx r = residual(x, sigma);
        if (std::abs(r) < tol) {
            return point_at(c.from_compact(x), sigma > 0 ? Sheet::plus : Sheet::minus);
        }
        cplx step = r * w_plus_compact(x, lm, lp) / (sigma * ac);
        const double cap = 0.5 * std::max(std::abs(x), lm);
        if (std::abs(step) > cap) {
            step *= cap / std::abs(step);
        }
        cplx nx = x - step;
        if (x.imag() * nx.imag() < 0.0) {
            const double s = x.imag() / (x.imag() - nx.imag());
            if (on_cut(x.real() + s * (nx.real() - x.real()))) {
                sigma = -sigma;
            }
        }
        if (nx.imag() == 0.0) {
            nx += cplx(0.0, 1e-14 * lp);
        }
        x = nx;
    }
    return std::nullopt;
}

cplx omega_sk(cplx z, const CurveData &c)
{
    const auto &m = c.modulus;
    return c.a * c.alpha * (theta1_dlog(z - c.A0_plus, m, 1) + theta1_dlog(z - c.A0_minus, m, 1));
}

cplx omega_sk_prime(cplx z, const CurveData &c)
{
    const auto &m = c.modulus;
    return c.a * c.alpha * (theta1_dlog(z - c.A0_plus, m, 2) + theta1_dlog(z - c.A0_minus, m, 2));
}

cplx omega_sk(const SurfacePoint &p, const CurveData &c)
{
    if (p.marked == Marked::zero_plus || p.marked == Marked::zero_minus) {
        throw Error(ErrorCode::pole, "Omega has simple poles at 0+ and 0-");
    }
    return omega_sk(abel(p, c), c);
}

std::pair<cplx, cplx> omega_residues(const CurveData &c)
{
    const auto &m = c.modulus;
    const cplx dir = std::polar(1.0, pi / 7.0);
    auto residue = [&](Marked which) {
        const SurfacePoint zp = c.marked_point(which);
        const cplx z0 = abel(zp, c);
        const cplx other = (which == Marked::zero_plus ? c.A0_minus : c.A0_plus);
        auto sample = [&](double h) {
            const cplx lambda = h * dir;
            const cplx dz = sign_of(zp.sheet) * c.alpha_c()
                            * segment_integral(0.0, c.to_compact(lambda), c.lminus, c.lplus);
            const cplx om = c.a * c.alpha * (theta1_dlog(dz, m, 1) + theta1_dlog(z0 + dz - other, m, 1));
            return lambda * om;
        };
        // lambda Omega = r + c1 lambda + ...; two Richardson levels over h, h/10, h/100
        const cplx g0 = sample(1e-3), g1 = sample(1e-4), g2 = sample(1e-5);
        const cplx r01 = (10.0 * g1 - g0) / 9.0;
        const cplx r12 = (10.0 * g2 - g1) / 9.0;
        return (100.0 * r12 - r01) / 99.0;
    };
    return {residue(Marked::zero_plus), residue(Marked::zero_minus)};
}

std::pair<cplx, cplx> omega_periods(const CurveData &c)
{
    const cplx z0 = 0.37 * two_pi_i + 0.21 * c.B + 0.05;
    const cplx base = omega_sk(z0, c);
    return {omega_sk(z0 + two_pi_i, c) - base, omega_sk(z0 + c.B, c) - base};
}

VelocityCheck v_constant(const CurveData &c, double tol)
{
    VelocityCheck out{};
    out.V = c.V;

    // Fresh a-period so that a corrupted CurveData is caught.
    const cplx Ac = period_compact(a_cycle(c.lminus, c.lplus), c.lminus, c.lplus).value / c.rho;
    const cplx alpha = two_pi_i / Ac;

    constexpr int n = 64;
    const double r = 1.0 / (8.0 * c.lplus);
    cplx total = 0.0;
    for (Sheet s : {Sheet::plus, Sheet::minus}) {
        cplx acc = 0.0;
        for (int k = 0; k < n; ++k) {
            const cplx zeta = r * std::polar(1.0, 2.0 * pi * (k + 0.5) / n);
            const SurfacePoint p = point_at(1.0 / zeta, s);
            // mu omega = mu alpha d lambda / w, d lambda = -d zeta / zeta^2
            const cplx f = mu(p, c) * alpha / w_value(p, c) * (-1.0 / (zeta * zeta));
            acc += f * zeta;  // d zeta = i zeta d theta
        }
        total += acc / static_cast<double>(n);
    }
    out.V_residue = -total;
    out.V_b_period = -omega_periods(c).second;
    out.rel_residue = std::abs(out.V - out.V_residue) / std::abs(out.V);
    out.rel_b_period = std::abs(out.V - out.V_b_period) / std::abs(out.V);
    if (!(out.rel_residue <= tol)) {
        throw Error(ErrorCode::identity_violation,
                    "V disagrees with the residue sum of mu omega at infinity");
    }
    return out;
}

InfinityExpansion expansion_at_infinity(int j, const CurveData &c)
{
    if (j != 1 && j != 2) {
        throw Error(ErrorCode::invalid_argument, "j must be 1 or 2");
    }
    const double s = (j == 1) ? 1.0 : -1.0;
    const cplx Q = (j == 1) ? c.Ainf_plus : c.Ainf_minus;
    auto omega_at = [&](double zeta) {
        const cplx zc = c.rho * zeta;
        const cplx z = Q - s * c.alpha_c() * zeta_integral(0.0, zc, c.lminus, c.lplus);
        return omega_sk(z, c);
    };
    constexpr int levels = 5;
    std::array<cplx, levels> even{}, odd{};
    for (int mlev = 0; mlev < levels; ++mlev) {
        const double h = 1e-2 * std::ldexp(1.0, -mlev);
        const cplx op = omega_at(h), om = omega_at(-h);
        even[mlev] = 0.5 * (op + om);
        odd[mlev] = (op - om) / (2.0 * h);
    }
    // Richardson in h^2 with ratio 4.
    double change = 0.0;
    for (int lev = 1; lev < levels; ++lev) {
        const double f = std::pow(4.0, lev);
        for (int k = levels - 1; k >= lev; --k) {
            even[k] = (f * even[k] - even[k - 1]) / (f - 1.0);
            odd[k] = (f * odd[k] - odd[k - 1]) / (f - 1.0);
        }
    }
    change = std::max(std::abs(even[levels - 1] - even[levels - 2]),
                      std::abs(odd[levels - 1] - odd[levels - 2]));
    const double scale = std::max({1.0, std::abs(even[levels - 1]), std::abs(odd[levels - 1])});
    if (!(change <= 1e-7 * scale)) {
        throw Error(ErrorCode::extrapolation_nonconvergence, "Omega expansion at infinity");
    }
    return {s * c.alpha, even[levels - 1], odd[levels - 1], change};
}

InfinityExpansion expansion_at_infinity_exact(int j, const CurveData &c)
{
    if (j != 1 && j != 2) {
        throw Error(ErrorCode::invalid_argument, "j must be 1 or 2");
    }
    const double s = (j == 1) ? 1.0 : -1.0;
    const cplx Q = (j == 1) ? c.Ainf_plus : c.Ainf_minus;
    const cplx aj = s * c.alpha;
    return {aj, omega_sk(Q, c), -aj * omega_sk_prime(Q, c), 0.0};
}

} // namespace spintop
