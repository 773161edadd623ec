#pragma once

// Composite Gauss-Legendre quadrature on [0, 1] with global panel doubling.

#include <array>
#include <cmath>
#include <complex>

#include "spintop/types.hpp"

namespace spintop::quad {

inline constexpr int gl_order = 32;

struct GaussLegendre {
    std::array<double, gl_order> nodes;   // on [-1, 1]
    std::array<double, gl_order> weights;
};

const GaussLegendre &gauss_legendre();

struct Options {
    double rel_tol = 1e-12;
    double abs_tol = 1e-15;
    int min_panels = 2;
    int max_panels = 4096;
};

struct Result {
    cplx value;
    int panels = 0;
    double last_change = 0.0;
};

template <class F>
cplx panel_sum(F &&f, int panels)
{
    const auto &gl = gauss_legendre();
    const double h = 1.0 / panels;
    cplx total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double mid = (p + 0.5) * h;
        cplx acc = 0.0;
        for (int i = 0; i < gl_order; ++i) {
            acc += gl.weights[i] * f(mid + 0.5 * h * gl.nodes[i]);
        }
        total += acc * (0.5 * h);
    }
    return total;
}

/// Integrates f over [0, 1], doubling the panel count until two successive
/// estimates agree to rel_tol (or abs_tol).
template <class F>
Result integrate(F &&f, const Options &opt = {})
{
    int panels = opt.min_panels;
    cplx prev = panel_sum(f, panels);
    while (true) {
        panels *= 2;
        if (panels > opt.max_panels) {
            throw Error(ErrorCode::quadrature_nonconvergence,
                        "panel cap reached without convergence");
        }
        const cplx cur = panel_sum(f, panels);
        const double change = std::abs(cur - prev);
        if (!std::isfinite(change)) {
            throw Error(ErrorCode::quadrature_nonconvergence, "non-finite integrand");
        }
        if (change <= std::max(opt.rel_tol * std::abs(cur), opt.abs_tol)) {
            return {cur, panels, change};
        }
        prev = cur;
    }
}

} // namespace spintop::quad
