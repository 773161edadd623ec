#include "spintop/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/SVD>

namespace spintop {

namespace {

double max_abs(const Mat2 &M) { return M.cwiseAbs().maxCoeff(); }

} // namespace

const char *to_string(Classification c)
{
    return c == Classification::canonical ? "canonical" : "non-canonical-suspected";
}

Mat2 build_Phi(cplx lambda, double t, const BAContext &ctx, FactorSign sign)
{
    const auto &c = ctx.curve;
    for (cplx e : c.branch_points_physical()) {
        if (std::abs(lambda - e) < eps_branch) {
            throw Error(ErrorCode::branch_point_collision, "sheets coincide over a branch point");
        }
    }
    Mat2 Phi;
    for (int k = 0; k < 2; ++k) {
        const SurfacePoint p = point_at(lambda, k == 0 ? Sheet::plus : Sheet::minus);
        const cplx z = abel(p, c);
        const cplx factor = (sign == FactorSign::plus) ? std::exp(-mu(p, c) * t) : cplx(1.0);
        for (int j = 0; j < 2; ++j) {
            Phi(j, k) = factor * ba_minus_z(j + 1, z, t, ctx);
        }
    }
    return Phi;
}

double condition_number(const Mat2 &M)
{
    const Eigen::JacobiSVD<Mat2> svd(M);
    const auto &s = svd.singularValues();
    return s(1) == 0.0 ? std::numeric_limits<double>::infinity() : s(0) / s(1);
}

Mat2 g_factor(cplx lambda, double t, const BAContext &ctx, FactorSign sign)
{
    const Mat2 P0 = build_Phi(lambda, 0.0, ctx, sign);
    if (!(condition_number(P0) < cond_max)) {
        throw Error(ErrorCode::ill_conditioned_basis, "Phi(lambda, 0) is ill conditioned");
    }
    return build_Phi(lambda, t, ctx, sign) * P0.inverse();
}

FactorPair factor_pair(const RotatorState &state0, const BAContext &ctx, cplx lambda, double t)
{
    const Mat2 P0 = build_Phi(lambda, 0.0, ctx, FactorSign::minus);
    const double cond = condition_number(P0);
    if (!(cond < cond_max)) {
        throw Error(ErrorCode::ill_conditioned_basis, "Phi(lambda, 0) is ill conditioned");
    }
    const Mat2 P0inv = P0.inverse();
    const Mat2 Pm = build_Phi(lambda, t, ctx, FactorSign::minus);
    // Phi+(t) = Phi-(t) diag(exp(-mu(p_k) t)); Phi+(0) = Phi-(0).
    Mat2 Pp = Pm;
    for (int k = 0; k < 2; ++k) {
        const SurfacePoint p = point_at(lambda, k == 0 ? Sheet::plus : Sheet::minus);
        Pp.col(k) *= std::exp(-mu(p, ctx.curve) * t);
    }
    FactorPair out;
    out.lambda = lambda;
    out.t = t;
    out.gplus = Pp * P0inv;
    out.gminus = Pm * P0inv;
    const Mat2 prod = out.gplus.inverse() * out.gminus;
    const Mat2 ref = matrix_exp(state0, lambda, t);
    out.residual = (prod - ref).norm() / ref.norm();
    out.det_error = std::abs(prod.determinant() - 1.0);
    out.conditioning = cond;
    return out;
}

std::vector<cplx> circle_contour(double radius, int n)
{
    if (!(radius > 0.0) || n < 1) {
        throw Error(ErrorCode::invalid_argument, "contour needs radius > 0 and n >= 1");
    }
    std::vector<cplx> out;
    out.reserve(n);
    for (int k = 0; k < n; ++k) {
        out.push_back(std::polar(radius, 2.0 * pi * k / n));
    }
    return out;
}

FactorizationReport verify_factorization(const RotatorState &state0, const BAContext &ctx,
                                         const std::vector<double> &t_grid,
                                         const std::vector<cplx> &contour)
{
    FactorizationReport rep;
    rep.contour = contour;
    rep.t_grid = t_grid;
    rep.blowup_time_estimate = detect_blowup(ctx);
    const auto &c = ctx.curve;
    bool suspect = false;
    for (double t : t_grid) {
        const double window = theta1_reduced_magnitude(ctx.A1 + c.V * t, c.modulus);
        rep.theta_window.push_back(window);
        if (window < eps_canonical) {
            suspect = true;
        }
        for (cplx lambda : contour) {
            try {
                FactorPair fp = factor_pair(state0, ctx, lambda, t);
                if (!std::isfinite(fp.residual)) {
                    throw Error(ErrorCode::overflow, "non-finite factorization residual");
                }
                rep.max_residual = std::max(rep.max_residual, fp.residual);
                rep.max_det_error = std::max(rep.max_det_error, fp.det_error);
                rep.samples.push_back(fp);
            } catch (const Error &e) {
                rep.skipped.push_back({lambda, t, e.what()});
                // a conditioning skip is benign; anything else means the window is left
                if (e.code() != ErrorCode::ill_conditioned_basis
                    && e.code() != ErrorCode::branch_point_collision) {
                    suspect = true;
                }
            }
        }
    }
    if (rep.max_residual > tol_fact) {
        suspect = true;
    }
    if (rep.blowup_time_estimate && !t_grid.empty()
        && *rep.blowup_time_estimate <= *std::max_element(t_grid.begin(), t_grid.end())) {
        suspect = true;
    }
    rep.classification = suspect ? Classification::non_canonical_suspected : Classification::canonical;
    return rep;
}

Conjugation evolve_by_conjugation(const RotatorState &state0, const BAContext &ctx, cplx lambda,
                                  double t)
{
    const FactorPair fp = factor_pair(state0, ctx, lambda, t);
    const Mat2 L0 = build_lax(state0, lambda).L;
    Conjugation out;
    out.L_plus = fp.gplus * L0 * fp.gplus.inverse();
    out.L_minus = fp.gminus * L0 * fp.gminus.inverse();
    const double period_scale = std::min(std::abs(ctx.curve.Acal), std::abs(ctx.curve.Bcal));
    const double h = period_scale / (2.0 * ctx.curve.a) / 4096.0;
    RotatorState st = state0;
    st.t = 0.0;
    out.L_oracle = build_lax(evolve_state(st, t, h), lambda).L;
    out.plus_minus = max_abs(out.L_plus - out.L_minus);
    out.oracle = max_abs(out.L_plus - out.L_oracle);
    return out;
}

std::optional<double> detect_blowup(const BAContext &ctx)
{
    const auto &c = ctx.curve;
    const cplx P1 = c.Acal, P2 = c.Bcal;
    // Real coordinates in the basis (P1, P2).
    auto coords = [&](cplx z) {
        const double det = P1.real() * P2.imag() - P1.imag() * P2.real();
        const double x = (z.real() * P2.imag() - z.imag() * P2.real()) / det;
        const double y = (P1.real() * z.imag() - P1.imag() * z.real()) / det;
        return std::make_pair(x, y);
    };
    const auto [x, y] = coords(ctx.A1 / c.alpha);
    const auto [p, q] = coords(cplx(2.0 * c.a));
    constexpr double tol = 1e-8;
    auto first_crossing = [](double offset, double rate) {
        // smallest t > 0 with offset + rate t an integer
        const double target = (rate > 0.0) ? std::floor(offset) + 1.0 : std::ceil(offset) - 1.0;
        return (target - offset) / rate;
    };
    if (std::abs(q) < tol * std::abs(p)) {
        if (std::abs(y - std::round(y)) > tol) {
            return std::nullopt;
        }
        return first_crossing(x, p);
    }
    if (std::abs(p) < tol * std::abs(q)) {
        if (std::abs(x - std::round(x)) > tol) {
            return std::nullopt;
        }
        return first_crossing(y, q);
    }
    // An oblique direction meets the lattice only for commensurate coordinates,
    // which does not happen for the real curves handled here.
    return std::nullopt;
}

} // namespace spintop
