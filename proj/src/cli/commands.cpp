#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include "common.hpp"
#include "spintop/factorization.hpp"
#include "spintop/oracles.hpp"

namespace spintop::cli {

using namespace detail;

namespace {

void emit(const Report &j, std::string &s, int indent, int depth)
{
    auto newline = [&](int d) {
        if (indent >= 0) {
            s += '\n';
            s.append(static_cast<std::size_t>(d * indent), ' ');
        }
    };
    switch (j.type()) {
    case Report::value_t::object: {
        if (j.empty()) {
            s += "{}";
            return;
        }
        // small flat objects such as complex numbers stay on one line
        bool inline_obj = j.size() <= 3;
        for (const auto &e : j) {
            inline_obj = inline_obj && !e.is_structured();
        }
        s += '{';
        bool first = true;
        for (auto it = j.begin(); it != j.end(); ++it) {
            s += first ? "" : (inline_obj && indent >= 0 ? ", " : ",");
            first = false;
            if (!inline_obj) {
                newline(depth + 1);
            }
            s += Report(it.key()).dump();
            s += indent >= 0 ? ": " : ":";
            emit(it.value(), s, indent, depth + 1);
        }
        if (!inline_obj) {
            newline(depth);
        }
        s += '}';
        return;
    }
    case Report::value_t::array: {
        if (j.empty()) {
            s += "[]";
            return;
        }
        bool flat = true;
        for (const auto &e : j) {
            flat = flat && !e.is_structured();
        }
        s += '[';
        bool first = true;
        for (const auto &e : j) {
            s += first ? "" : (flat && indent >= 0 ? ", " : ",");
            first = false;
            if (!flat) {
                newline(depth + 1);
            }
            emit(e, s, indent, depth + 1);
        }
        if (!flat) {
            newline(depth);
        }
        s += ']';
        return;
    }
    case Report::value_t::number_float: {
        const double x = j.get<double>();
        s += std::isfinite(x) ? fmt17(x) : "null";
        return;
    }
    default:
        s += j.dump();
    }
}

void require_json(const RunConfig &cfg, const char *command)
{
    if (format_of(cfg, Format::json) != Format::json) {
        throw Error(ErrorCode::invalid_argument, std::string(command) + " only writes JSON reports");
    }
}

Report optional_number(const std::optional<double> &x)
{
    return x ? Report(*x) : Report(nullptr);
}

double observable_of(const RotatorState &s)
{
    const double v = (s.variant == Variant::compact) ? std::sin(s.angle) : std::sinh(s.angle);
    return v * v;
}

bool default_state(const RunConfig &cfg) { return !cfg.angle0; }

} // namespace

std::string dump17(const Report &j, int indent)
{
    std::string s;
    emit(j, s, indent, 0);
    s += '\n';
    return s;
}

CommandOutput cmd_curve(const RunConfig &cfg)
{
    validate(cfg);
    require_json(cfg, "curve");
    const double E = energy_of(cfg);
    log().info("curve: a={} E={} variant={}", cfg.a, E, to_string(cfg.variant));
    const CurveData c = curve_of(cfg, E);
    const CurveData c2 = curve_of(cfg, E, 2);
    const VelocityCheck vc = v_constant(c, std::numeric_limits<double>::infinity());
    const auto [res_plus, res_minus] = omega_residues(c);
    const auto [om_a, om_b] = omega_periods(c);

    Report r = header("curve", cfg);
    r["energy"] = E;
    Report phys = Report::array();
    for (cplx e : c.branch_points_physical()) {
        phys.push_back(cj(e));
    }
    r["branch_points"] = {{"l_minus", c.lminus}, {"l_plus", c.lplus}, {"physical", phys}};
    r["A_period"] = cj(c.Acal);
    r["B_period"] = cj(c.Bcal);
    r["tau"] = cj(c.tau);
    r["B"] = cj(c.B);
    r["alpha"] = cj(c.alpha);
    r["V"] = cj(c.V);
    r["im_tau_positive"] = c.tau.imag() > 0.0;
    r["b_flipped"] = c.b_flipped;
    r["abel_images"] = {{"zero_plus", cj(c.A0_plus)},
                        {"zero_minus", cj(c.A0_minus)},
                        {"inf_plus", cj(c.Ainf_plus)},
                        {"inf_minus", cj(c.Ainf_minus)}};
    r["identities"] = {
        {"a_period_quadrature_change", c.a_period_change},
        {"a_period_doubling_rel", std::abs(c2.Acal - c.Acal) / std::abs(c.Acal)},
        {"v_residue_rel", vc.rel_residue},
        {"v_b_period_rel", vc.rel_b_period},
        {"omega_a_period_abs", std::abs(om_a)},
        {"omega_residue_zero_plus", std::abs(res_plus - cfg.a) / cfg.a},
        {"omega_residue_zero_minus", std::abs(res_minus + cfg.a) / cfg.a},
    };
    CommandOutput out{dump17(r), 0};
    if (!(vc.rel_residue <= tolerance(cfg, "v_residue"))) {
        log().error("velocity identity violated: rel residue {}", vc.rel_residue);
        out.exit_code = 4;
    }
    return out;
}

CommandOutput cmd_solve(const RunConfig &cfg)
{
    validate(cfg);
    const RotatorState s0 = state_of(cfg);
    const double E = energy_of(cfg);
    const bool compact = cfg.variant == Variant::compact;
    const CurveData c = curve_of(cfg, E);
    const BAContext ctx = context_of(cfg, c, s0);
    const double scale = time_scale(cfg, s0);
    const double t_max = t_max_of(cfg, s0);
    const double h = rk4_step_of(scale);
    log().info("solve: t_max={} steps={} rk4 step={}", t_max, cfg.t_steps, h);

    std::vector<std::vector<double>> rows;
    bool truncated = false;
    double worst = 0.0;
    RotatorState s = s0;
    for (double t : t_grid(t_max, cfg.t_steps)) {
        double pipeline;
        try {
            if (t > s.t) {
                s = evolve_state(s, t - s.t, h);
            }
            pipeline = compact ? solution_sin2(t, ctx) : solution_sinh2(t, ctx);
        } catch (const Error &e) {
            if (e.code() != ErrorCode::blow_up_detected
                && e.code() != ErrorCode::canonical_window_violated) {
                throw;
            }
            log().info("series truncated at t={}: {}", t, e.what());
            truncated = true;
            break;
        }
        const double closed = oracle::observable(s0, t);
        const double rk4 = observable_of(s);
        const double size = std::max({1.0, std::abs(pipeline), std::abs(closed), std::abs(rk4)});
        const double err = std::max({std::abs(pipeline - closed), std::abs(pipeline - rk4),
                                     std::abs(closed - rk4)})
                           / size;
        worst = std::max(worst, err);
        rows.push_back({t, pipeline, closed, rk4, err});
    }

    Report meta;
    meta["command"] = "solve";
    meta["version"] = report_version;
    meta["variant"] = to_string(cfg.variant);
    meta["a"] = cfg.a;
    meta["energy"] = E;
    meta["t_max"] = t_max;
    meta["t_steps"] = cfg.t_steps;
    meta["rows"] = rows.size();
    meta["truncated"] = truncated;
    meta["max_pairwise_err"] = worst;
    if (compact) {
        meta["period"] = scale;
    } else {
        meta["blowup_time"] = optional_number(detect_blowup(ctx));
        meta["blowup_time_sc"] = scale;
        const Trajectory tr = integrate_phase(s0, 2.0 * scale, h);
        meta["blowup_time_rk4"] =
            tr.blowup ? Report(0.5 * (tr.blowup->first + tr.blowup->second)) : Report(nullptr);
        if (default_state(cfg)) {
            const cplx u0 = u0_integral({modulus_ksq(cfg.a, E)}, Variant::noncompact);
            meta["blowup_time_u0"] = u0.real() / (2.0 * cfg.a);
        }
    }
    const std::string o = compact ? "sin2" : "sinh2";
    const std::vector<std::string> columns{"t", o + "_theta_pipeline", o + (compact ? "_sn" : "_sc"),
                                           o + "_rk4", "pairwise_err"};
    if (format_of(cfg, Format::csv) == Format::csv) {
        return {csv(meta, columns, rows), 0};
    }
    Report r = header("solve", cfg);
    r["metadata"] = meta;
    r["columns"] = columns;
    r["rows"] = rows;
    return {dump17(r), 0};
}

CommandOutput cmd_factorize(const RunConfig &cfg)
{
    validate(cfg);
    const RotatorState s0 = state_of(cfg);
    const double E = energy_of(cfg);
    const CurveData c = curve_of(cfg, E);
    const BAContext ctx = context_of(cfg, c, s0);
    const std::vector<double> ts = t_grid(t_max_of(cfg, s0), cfg.t_steps);
    const FactorizationReport rep =
        verify_factorization(s0, ctx, ts, circle_contour(cfg.contour_radius, cfg.contour_points));
    const int code = rep.classification == Classification::canonical ? 0 : 3;
    log().info("factorize: {} samples, {} skipped, {}", rep.samples.size(), rep.skipped.size(),
               to_string(rep.classification));

    Report meta;
    meta["command"] = "factorize";
    meta["version"] = report_version;
    meta["variant"] = to_string(cfg.variant);
    meta["energy"] = E;
    meta["classification"] = to_string(rep.classification);
    meta["max_residual"] = rep.max_residual;
    meta["max_det_error"] = rep.max_det_error;
    meta["blowup_time_estimate"] = optional_number(rep.blowup_time_estimate);
    meta["skipped"] = rep.skipped.size();

    if (format_of(cfg, Format::json) == Format::csv) {
        std::vector<std::vector<double>> rows;
        for (const auto &s : rep.samples) {
            rows.push_back({s.lambda.real(), s.lambda.imag(), s.t, s.residual, s.det_error, s.conditioning});
        }
        return {csv(meta, {"lambda_re", "lambda_im", "t", "residual", "det_error", "conditioning"}, rows),
                code};
    }
    Report r = header("factorize", cfg);
    r["energy"] = E;
    r["classification"] = to_string(rep.classification);
    r["max_residual"] = rep.max_residual;
    r["max_det_error"] = rep.max_det_error;
    r["blowup_time_estimate"] = optional_number(rep.blowup_time_estimate);
    r["t_grid"] = rep.t_grid;
    r["theta_window"] = rep.theta_window;
    Report samples = Report::array();
    for (const auto &s : rep.samples) {
        samples.push_back({{"lambda", cj(s.lambda)},
                           {"t", s.t},
                           {"residual", s.residual},
                           {"det_error", s.det_error},
                           {"conditioning", s.conditioning}});
    }
    r["samples"] = samples;
    Report skipped = Report::array();
    for (const auto &s : rep.skipped) {
        skipped.push_back({{"lambda", cj(s.lambda)}, {"t", s.t}, {"reason", s.reason}});
    }
    r["skipped"] = skipped;
    return {dump17(r), code};
}

CommandOutput cmd_scan(const RunConfig &cfg)
{
    validate(cfg);
    if (cfg.angle0) {
        throw Error(ErrorCode::invalid_argument, "scan runs over energies, not a given state");
    }
    std::vector<double> energies = cfg.energies;
    if (energies.empty()) {
        for (double e : {1.5, 2.0, 3.0, 5.0, 10.0}) {
            energies.push_back(e * cfg.a * cfg.a);
        }
    }
    const std::size_t n = energies.size();
    std::vector<std::vector<double>> rows(n);
    std::vector<std::optional<Error>> errors(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            try {
                RunConfig one = cfg;
                one.E = energies[k];
                const CurveData c = curve_of(one, energies[k]);
                const VelocityCheck vc = v_constant(c, std::numeric_limits<double>::infinity());
                const RotatorState s0 = state_of(one);
                const double nan = std::numeric_limits<double>::quiet_NaN();
                double period = nan, blowup = nan;
                if (cfg.variant == Variant::compact) {
                    period = time_scale(one, s0);
                } else {
                    blowup = detect_blowup(build_context_from_state(c, s0)).value_or(nan);
                }
                rows[k] = {energies[k], c.lminus, c.lplus, c.Acal.real(), c.Acal.imag(), c.Bcal.real(),
                           c.Bcal.imag(), c.tau.real(), c.tau.imag(), c.alpha.real(), c.alpha.imag(),
                           c.V.real(), c.V.imag(), vc.rel_residue, vc.rel_b_period, period, blowup};
            } catch (const Error &e) {
                errors[k] = e;
            }
        }
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), n));
    log().info("scan: {} energies on {} threads", n, workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (auto &t : pool) {
        t.join();
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (errors[k]) {
            throw Error(errors[k]->code(), "energy " + fmt17(energies[k]) + ": " + errors[k]->what());
        }
    }

    const std::vector<std::string> columns{
        "energy", "l_minus", "l_plus", "A_re", "A_im", "B_re", "B_im", "tau_re", "tau_im",
        "alpha_re", "alpha_im", "V_re", "V_im", "v_residue_rel", "v_b_period_rel", "period", "blowup_time"};
    Report meta;
    meta["command"] = "scan";
    meta["version"] = report_version;
    meta["variant"] = to_string(cfg.variant);
    meta["a"] = cfg.a;
    meta["points"] = n;
    if (format_of(cfg, Format::csv) == Format::csv) {
        return {csv(meta, columns, rows), 0};
    }
    Report r = header("scan", cfg);
    r["metadata"] = meta;
    r["columns"] = columns;
    r["rows"] = rows;
    return {dump17(r), 0};
}

} // namespace spintop::cli
