#pragma once

// Riemann-Hilbert factorization exp(t L(lambda)) = g+^-1 g- assembled from
// Baker-Akhiezer functions: g+- = Phi+-(t) Phi+-(0)^-1 with
// Phi[j][k] = phi^j(p_k), p_1 over lambda on sheet +, p_2 on sheet -.

#include <optional>
#include <string>
#include <vector>

#include "spintop/baker_akhiezer.hpp"

namespace spintop {

inline constexpr double cond_max = 1e8;
inline constexpr double eps_canonical = 1e-6;
inline constexpr double tol_fact = 1e-5;

enum class FactorSign { plus, minus };

Mat2 build_Phi(cplx lambda, double t, const BAContext &ctx, FactorSign sign);

/// 2-norm condition number.
double condition_number(const Mat2 &M);

Mat2 g_factor(cplx lambda, double t, const BAContext &ctx, FactorSign sign);

struct FactorPair {
    cplx lambda;
    double t;
    Mat2 gplus, gminus;
    double residual;     // |g+^-1 g- - e^{tL}|_F / |e^{tL}|_F
    double det_error;    // |det(g+^-1 g-) - 1|
    double conditioning; // cond Phi(lambda, 0)
};

FactorPair factor_pair(const RotatorState &state0, const BAContext &ctx, cplx lambda, double t);

enum class Classification { canonical, non_canonical_suspected };

const char *to_string(Classification c);

struct SkippedSample {
    cplx lambda;
    double t;
    std::string reason;
};

struct FactorizationReport {
    std::vector<cplx> contour;
    std::vector<double> t_grid;
    std::vector<FactorPair> samples;
    std::vector<SkippedSample> skipped;
    std::vector<double> theta_window;  // |theta1(A1 + V t)| / |theta1'(0)| per t
    double max_residual = 0.0;
    double max_det_error = 0.0;
    Classification classification = Classification::canonical;
    std::optional<double> blowup_time_estimate;
};

/// n points on |lambda| = radius, starting on the positive real axis.
std::vector<cplx> circle_contour(double radius = 1.0, int n = 64);

FactorizationReport verify_factorization(const RotatorState &state0, const BAContext &ctx,
                                         const std::vector<double> &t_grid,
                                         const std::vector<cplx> &contour);

struct Conjugation {
    Mat2 L_plus;        // g+ L(0) g+^-1
    Mat2 L_minus;       // g- L(0) g-^-1
    Mat2 L_oracle;      // build_lax of the RK4-evolved state
    double plus_minus;  // max entrywise difference
    double oracle;      // max entrywise difference to the oracle
};

Conjugation evolve_by_conjugation(const RotatorState &state0, const BAContext &ctx, cplx lambda,
                                  double t);

/// Smallest t > 0 with 2 a t + A1/alpha on the period lattice (Acal, Bcal), if
/// the line ever meets it.
std::optional<double> detect_blowup(const BAContext &ctx);

} // namespace spintop
