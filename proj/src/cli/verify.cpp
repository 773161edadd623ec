#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "common.hpp"
#include "spintop/factorization.hpp"
#include "spintop/oracles.hpp"

namespace spintop::cli {

using namespace detail;

namespace {

class Suite
{
public:
    explicit Suite(const RunConfig &cfg) : cfg_(cfg) {}

    /// Runs body, which returns the measured residual for the named tolerance.
    void measure(const std::string &name, const std::function<double()> &body)
    {
        const double thr = tolerance(cfg_, name);
        Report entry{{"name", name}};
        try {
            const double m = body();
            const bool pass = m <= thr;
            entry["measured"] = m;
            entry["threshold"] = thr;
            entry["pass"] = pass;
            failed_ += pass ? 0 : 1;
        } catch (const Error &e) {
            entry["measured"] = nullptr;
            entry["threshold"] = thr;
            entry["pass"] = false;
            entry["error"] = e.what();
            ++failed_;
        }
        log().debug("verify {}: {}", name, entry["pass"].get<bool>() ? "pass" : "FAIL");
        checks_.push_back(entry);
    }

    /// A yes/no property with a short description of what was observed.
    void holds(const std::string &name, const std::function<std::pair<bool, std::string>()> &body)
    {
        Report entry{{"name", name}};
        try {
            const auto [ok, seen] = body();
            entry["observed"] = seen;
            entry["pass"] = ok;
            failed_ += ok ? 0 : 1;
        } catch (const Error &e) {
            entry["pass"] = false;
            entry["error"] = e.what();
            ++failed_;
        }
        checks_.push_back(entry);
    }

    const Report &checks() const { return checks_; }
    int failed() const { return failed_; }

private:
    const RunConfig &cfg_;
    Report checks_ = Report::array();
    int failed_ = 0;
};

/// Uniform doubles in [0, 1) from the top 53 bits of a 64-bit Mersenne twister,
/// identical on every platform.
class Probe
{
public:
    explicit Probe(std::uint64_t seed) : gen_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0)
    {
        return lo + (hi - lo) * std::ldexp(static_cast<double>(gen_() >> 11), -53);
    }

private:
    std::mt19937_64 gen_;
};

double rel(cplx x, cplx y) { return std::abs(x - y) / std::max(std::abs(y), 1e-300); }

double observable_of(const RotatorState &s)
{
    const double v = (s.variant == Variant::compact) ? std::sin(s.angle) : std::sinh(s.angle);
    return v * v;
}

} // namespace

CommandOutput cmd_verify(const RunConfig &cfg)
{
    validate(cfg);
    if (format_of(cfg, Format::json) != Format::json) {
        throw Error(ErrorCode::invalid_argument, "verify only writes JSON reports");
    }
    const RotatorState s0 = state_of(cfg);
    const double E = energy_of(cfg);
    const bool compact = cfg.variant == Variant::compact;
    const double a = cfg.a;
    Probe probe(cfg.seed);
    Suite suite(cfg);

    const CurveData c = curve_of(cfg, E);
    const auto &mod = c.modulus;
    const double scale = time_scale(cfg, s0);
    // compact: one period; noncompact: stay clear of the blow-up
    const double span = compact ? scale : 0.9 * scale;
    const double h = rk4_step_of(scale);
    std::optional<BAContext> ctx_store;
    std::string ctx_error;
    try {
        ctx_store = context_of(cfg, c, s0);
    } catch (const Error &e) {
        ctx_error = e.what();
    }
    auto ctx = [&]() -> const BAContext & {
        if (!ctx_store) {
            throw Error(ErrorCode::identity_violation, "no Baker-Akhiezer context: " + ctx_error);
        }
        return *ctx_store;
    };
    log().info("verify: a={} E={} variant={} seed={}", a, E, to_string(cfg.variant), cfg.seed);

    // special functions
    suite.measure("quasi_periodicity", [&] {
        double worst = 0.0;
        for (int k = 0; k < 8; ++k) {
            const cplx z = probe.uniform(-0.5, 0.5) * two_pi_i + probe.uniform(-0.5, 0.5) * c.B;
            const cplx t = theta(z, mod), t1 = theta1(z, mod);
            worst = std::max({worst, rel(theta(z + two_pi_i, mod), t),
                              rel(theta(z + c.B, mod), std::exp(-0.5 * c.B - z) * t),
                              rel(theta1(z + two_pi_i, mod), -t1),
                              rel(theta1(z + c.B, mod), -std::exp(-0.5 * c.B - z) * t1)});
        }
        return worst;
    });
    const WeierstrassLattice lat(0.5 * c.Acal, 0.5 * c.Bcal);
    suite.measure("wp_lattice", [&] {
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            const cplx u = probe.uniform(0.1, 0.9) * 2.0 * lat.omega1()
                           + probe.uniform(0.1, 0.9) * 2.0 * lat.omega2();
            worst = std::max(worst, rel(wp(u, lat), oracle::wp_lattice(u, lat.omega1(), lat.omega2())));
        }
        return worst;
    });
    suite.measure("wp_scaling", [&] {
        double worst = 0.0;
        for (int k = 0; k < 3; ++k) {
            const cplx s = std::polar(probe.uniform(0.5, 2.0), probe.uniform(0.0, 2.0 * pi));
            const cplx u = probe.uniform(0.1, 0.9) * 2.0 * lat.omega1()
                           + probe.uniform(0.1, 0.9) * 2.0 * lat.omega2();
            const WeierstrassLattice scaled(s * lat.omega1(), s * lat.omega2());
            worst = std::max(worst, rel(wp(s * u, scaled), wp(u, lat) / (s * s)));
        }
        return worst;
    });
    suite.measure("jacobi_sn", [&] {
        double worst = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double m = probe.uniform(0.05, 0.9), u = probe.uniform(-4.0, 4.0);
            worst = std::max(worst, std::abs(jacobi_sn(u, {m}) - std::sin(oracle::amplitude(u, m))));
        }
        return worst;
    });

    // spectral curve
    suite.measure("a_period_doubling", [&] {
        const CurveData c2 = curve_of(cfg, E, 2);
        return std::abs(c2.Acal - c.Acal) / std::abs(c.Acal);
    });
    VelocityCheck vc{};
    suite.measure("v_residue", [&] {
        vc = v_constant(c, std::numeric_limits<double>::infinity());
        return vc.rel_residue;
    });
    suite.measure("v_b_period", [&] { return vc.rel_b_period; });
    suite.measure("omega_a_period", [&] { return std::abs(omega_periods(c).first) / std::abs(c.V); });
    suite.measure("omega_residue", [&] {
        const auto [rp, rm] = omega_residues(c);
        return std::max(std::abs(rp - a), std::abs(rm + a)) / a;
    });

    // Baker-Akhiezer functions
    const std::vector<double> ts{0.0, 0.1 * span, 0.25 * span, 0.5 * span};
    suite.measure("omega_expansion", [&] { return ctx().omega_expansion_mismatch; });
    suite.measure("ba_no_monodromy", [&] {
        const BAContext &x = ctx();
        double worst = 0.0;
        const CyclePath loop = a_cycle(c.lminus, c.lplus);
        const SurfacePoint start = point_at(c.from_compact(loop.waypoints.front()), loop.sheets.front());
        std::vector<cplx> wps;
        for (std::size_t k = 1; k < loop.waypoints.size(); ++k) {
            wps.push_back(c.from_compact(loop.waypoints[k]));
        }
        const cplx z0 = abel(start, c);
        const Continued around = abel_continue(start, z0, wps, c);
        for (double t : ts) {
            for (int j = 1; j <= 2; ++j) {
                const cplx ref = ba_minus_z(j, z0, t, x);
                worst = std::max(worst, rel(ba_minus_z(j, around.value, t, x), ref));
                const cplx z = probe.uniform(-0.5, 0.5) * two_pi_i + probe.uniform(-0.5, 0.5) * c.B;
                const cplx f = ba_minus_z(j, z, t, x);
                worst = std::max({worst, rel(ba_minus_z(j, z + two_pi_i, t, x), f),
                                  rel(ba_minus_z(j, z + c.B, t, x), f)});
            }
        }
        return worst;
    });
    suite.measure("ba_residue_constancy", [&] {
        const BAContext &x = ctx();
        double worst = 0.0;
        for (double t : ts) {
            for (int j = 1; j <= 2; ++j) {
                worst = std::max(worst, std::abs(expansion_coeffs(j, t, x).psi0(j - 1) - x.d[j - 1]));
            }
        }
        return worst;
    });
    suite.measure("ba_expansion", [&] {
        const BAContext &x = ctx();
        double worst = 0.0;
        for (double t : ts) {
            for (int j = 1; j <= 2; ++j) {
                const ExpansionCoeffs e = expansion_coeffs(j, t, x), ex = expansion_coeffs_exact(j, t, x);
                worst = std::max({worst, (e.psi0 - ex.psi0).norm(), (e.psi1 - ex.psi1).norm()});
            }
        }
        return worst;
    });
    std::vector<RotatorState> states;
    for (double t : ts) {
        states.push_back(t == 0.0 ? s0 : evolve_state(s0, t, h));
    }
    suite.measure("ba_eigenvector", [&] {
        const BAContext &x = ctx();
        double worst = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const cplx lambda = std::polar(probe.uniform(0.5, 2.0), probe.uniform(0.05, 0.45) * pi);
            const Mat2 L = build_lax(states[k], lambda).L;
            for (Sheet sh : {Sheet::plus, Sheet::minus}) {
                const SurfacePoint p = point_at(lambda, sh);
                const Vec2 col(ba_minus(1, p, ts[k], x), ba_minus(2, p, ts[k], x));
                worst = std::max(worst, (L * col - mu(p, c) * col).norm() / col.norm());
            }
        }
        return worst;
    });
    suite.measure("ba_sinid", [&] {
        double worst = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            for (int j = 1; j <= 2; ++j) {
                worst = std::max(worst, check_sinid(j, ts[k], ctx(), states[k]));
            }
        }
        return worst;
    });
    suite.measure("ba_cosid", [&] {
        double worst = 0.0;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            for (int j = 1; j <= 2; ++j) {
                worst = std::max(worst, check_cosid(j, ts[k], ctx(), states[k]));
            }
        }
        return worst;
    });

    // Lax dynamics and the three-way comparison
    suite.measure("hamiltonian_lax", [&] {
        const double H = hamiltonian(s0);
        return std::abs(hamiltonian_from_lax(s0) - H) / std::max(1.0, std::abs(H));
    });
    const double flow_time = compact ? 5.0 * scale : span;
    suite.measure("energy_drift", [&] {
        const Trajectory tr = integrate_phase(s0, flow_time, h);
        const double H0 = hamiltonian(s0);
        double worst = 0.0;
        for (std::size_t k = 0; k < tr.t.size(); ++k) {
            const RotatorState s{cfg.variant, a, tr.angle[k], tr.momentum[k], tr.t[k]};
            worst = std::max(worst, std::abs(hamiltonian(s) - H0) / std::max(1.0, std::abs(H0)));
        }
        return worst;
    });
    suite.measure("det_drift", [&] {
        const cplx lambda = std::polar(1.3, 0.4);
        const LaxTrajectory lt = integrate_lax(s0, lambda, flow_time, compact ? h : 1e-4);
        const cplx d0 = lt.L.front().determinant();
        double worst = 0.0;
        for (const Mat2 &L : lt.L) {
            worst = std::max(worst, rel(L.determinant(), d0));
        }
        return worst;
    });
    suite.measure("triple_oracle", [&] {
        const BAContext &x = ctx();
        double worst = 0.0;
        RotatorState s = s0;
        for (double t : t_grid(span, 65)) {
            if (t > s.t) {
                s = evolve_state(s, t - s.t, h);
            }
            const double p = compact ? solution_sin2(t, x) : solution_sinh2(t, x);
            const double q = oracle::observable(s0, t), r = observable_of(s);
            const double size = std::max({1.0, std::abs(p), std::abs(q), std::abs(r)});
            worst = std::max(worst, std::max({std::abs(p - q), std::abs(p - r), std::abs(q - r)}) / size);
        }
        return worst;
    });

    // factorization
    const std::vector<cplx> contour = circle_contour(cfg.contour_radius, cfg.contour_points);
    std::optional<FactorizationReport> rep;
    suite.measure("factorization", [&] {
        rep = verify_factorization(s0, ctx(), {0.05 * scale, 0.1 * scale, 0.2 * scale}, contour);
        return rep->max_residual;
    });
    suite.measure("factorization_det", [&] {
        if (!rep) {
            throw Error(ErrorCode::identity_violation, "factorization did not run");
        }
        return rep->max_det_error;
    });
    suite.holds("factorization_canonical", [&] {
        if (!rep) {
            throw Error(ErrorCode::identity_violation, "factorization did not run");
        }
        const bool ok = rep->classification == Classification::canonical;
        return std::make_pair(ok, std::string(to_string(rep->classification)));
    });
    suite.measure("conjugation", [&] {
        const BAContext &x = ctx();
        double worst = 0.0;
        for (int k = 0; k < 10; ++k) {
            const cplx lambda = std::polar(probe.uniform(0.5, 2.0), probe.uniform(0.0, 2.0 * pi));
            const double t = probe.uniform(0.0, compact ? 0.2 * scale : 0.5 * scale);
            const Conjugation cg = evolve_by_conjugation(s0, x, lambda, t);
            worst = std::max({worst, cg.plus_minus, cg.oracle});
        }
        return worst;
    });

    if (!compact) {
        suite.measure("blowup", [&] {
            const auto tb = detect_blowup(ctx());
            if (!tb) {
                throw Error(ErrorCode::identity_violation, "no blow-up detected");
            }
            const Trajectory tr = integrate_phase(s0, 2.0 * scale, h);
            if (!tr.blowup) {
                throw Error(ErrorCode::identity_violation, "RK4 does not blow up");
            }
            return std::max(std::abs(*tb - scale), std::abs(tr.blowup->first - scale));
        });
        suite.holds("classification_flip", [&] {
            const auto tb = detect_blowup(ctx());
            if (!tb) {
                throw Error(ErrorCode::identity_violation, "no blow-up detected");
            }
            // the theta window closes like |V| dt near t*
            const double near = *tb - 0.1 * eps_canonical / std::abs(c.V);
            const double far = *tb * (1.0 - 1e-3);
            const auto before = verify_factorization(s0, ctx(), {far}, contour).classification;
            const auto at = verify_factorization(s0, ctx(), {near}, contour).classification;
            const bool ok = before == Classification::canonical
                            && at == Classification::non_canonical_suspected;
            return std::make_pair(ok, std::string(to_string(before)) + " -> " + to_string(at));
        });
    }

    Report r = header("verify", cfg);
    r["energy"] = E;
    r["checks"] = suite.checks();
    r["passed"] = static_cast<int>(suite.checks().size()) - suite.failed();
    r["failed"] = suite.failed();
    r["all_pass"] = suite.failed() == 0;
    return {dump17(r), suite.failed() == 0 ? 0 : 4};
}

} // namespace spintop::cli
