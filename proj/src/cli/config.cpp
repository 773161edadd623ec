#include <cmath>
#include <cstdio>
#include <sstream>

#include <spdlog/sinks/null_sink.h>

#include "common.hpp"
#include "spintop/lax_dynamics.hpp"
#include "spintop/oracles.hpp"

namespace spintop::cli {

const std::map<std::string, double> &default_tolerances()
{
    static const std::map<std::string, double> tol{
        {"quasi_periodicity", 1e-13},
        {"wp_lattice", 1e-8},
        {"wp_scaling", 1e-9},
        {"jacobi_sn", 1e-12},
        {"a_period_doubling", 1e-10},
        {"v_residue", 1e-8},
        {"v_b_period", 1e-8},
        {"omega_a_period", 1e-8},
        {"omega_residue", 1e-8},
        {"omega_expansion", 1e-7},
        {"ba_no_monodromy", 1e-8},
        {"ba_residue_constancy", 1e-8},
        {"ba_eigenvector", 1e-7},
        {"ba_expansion", 1e-8},
        {"ba_sinid", 1e-6},
        {"ba_cosid", 1e-9},
        {"hamiltonian_lax", 1e-12},
        {"energy_drift", 1e-9},
        {"det_drift", 1e-8},
        {"triple_oracle", 1e-6},
        {"factorization", 1e-6},
        {"factorization_det", 1e-8},
        {"conjugation", 1e-6},
        {"blowup", 1e-4},
    };
    return tol;
}

void validate(const RunConfig &cfg)
{
    auto fail = [](const std::string &what) { throw Error(ErrorCode::invalid_argument, what); };
    if (!(cfg.a > 0.0) || !std::isfinite(cfg.a)) {
        fail("a must be positive");
    }
    if (cfg.t_steps < 2) {
        fail("t_steps must be at least 2");
    }
    if (cfg.contour_points < 8) {
        fail("contour_points must be at least 8");
    }
    if (!(cfg.contour_radius > 0.0)) {
        fail("contour_radius must be positive");
    }
    if (cfg.t_max && !(*cfg.t_max >= 0.0)) {
        fail("t_max must be non-negative");
    }
    if (cfg.angle0.has_value() != cfg.momentum0.has_value()) {
        fail("angle0 and momentum0 must be given together");
    }
    if (cfg.E && cfg.angle0) {
        fail("give either the energy or (angle0, momentum0), not both");
    }
    if (!cfg.inject_fault.empty() && cfg.inject_fault != "acal") {
        fail("unknown fault '" + cfg.inject_fault + "'");
    }
    for (const auto &[name, value] : cfg.tolerances) {
        if (!default_tolerances().count(name)) {
            fail("unknown tolerance '" + name + "'");
        }
        if (!(value > 0.0)) {
            fail("tolerance '" + name + "' must be positive");
        }
    }
}

P1Override parse_p1(const std::string &s)
{
    std::stringstream ss(s);
    std::string re, im, sheet;
    if (!std::getline(ss, re, ',') || !std::getline(ss, im, ',') || !std::getline(ss, sheet)
        || (sheet != "+" && sheet != "-")) {
        throw Error(ErrorCode::invalid_argument, "p1 must read re,im,+ or re,im,-");
    }
    try {
        return {{std::stod(re), std::stod(im)}, sheet == "+" ? Sheet::plus : Sheet::minus};
    } catch (const std::exception &) {
        throw Error(ErrorCode::invalid_argument, "p1 coordinates are not numbers");
    }
}

namespace {

Variant parse_variant(const std::string &s)
{
    if (s == "compact") {
        return Variant::compact;
    }
    if (s == "noncompact") {
        return Variant::noncompact;
    }
    throw Error(ErrorCode::invalid_argument, "variant must be compact or noncompact");
}

Format parse_format(const std::string &s)
{
    if (s == "csv") {
        return Format::csv;
    }
    if (s == "json") {
        return Format::json;
    }
    throw Error(ErrorCode::invalid_argument, "format must be csv or json");
}

} // namespace

RunConfig merge_json(RunConfig cfg, const nlohmann::json &j)
{
    if (!j.is_object()) {
        throw Error(ErrorCode::invalid_argument, "configuration must be a JSON object");
    }
    try {
        for (const auto &[key, v] : j.items()) {
            if (key == "variant") {
                cfg.variant = parse_variant(v.get<std::string>());
            } else if (key == "a") {
                cfg.a = v.get<double>();
            } else if (key == "energy") {
                cfg.E = v.get<double>();
            } else if (key == "angle0") {
                cfg.angle0 = v.get<double>();
            } else if (key == "momentum0") {
                cfg.momentum0 = v.get<double>();
            } else if (key == "t_max") {
                cfg.t_max = v.get<double>();
            } else if (key == "t_steps") {
                cfg.t_steps = v.get<int>();
            } else if (key == "contour_radius") {
                cfg.contour_radius = v.get<double>();
            } else if (key == "contour_points") {
                cfg.contour_points = v.get<int>();
            } else if (key == "p1") {
                if (v.is_string()) {
                    cfg.p1 = parse_p1(v.get<std::string>());
                } else {
                    const std::string sheet = v.at("sheet").get<std::string>();
                    if (sheet != "+" && sheet != "-") {
                        throw Error(ErrorCode::invalid_argument, "p1 sheet must be + or -");
                    }
                    cfg.p1 = P1Override{{v.at("re").get<double>(), v.at("im").get<double>()},
                                        sheet == "+" ? Sheet::plus : Sheet::minus};
                }
            } else if (key == "format") {
                cfg.format = parse_format(v.get<std::string>());
            } else if (key == "seed") {
                cfg.seed = v.get<std::uint64_t>();
            } else if (key == "inject_fault") {
                cfg.inject_fault = v.get<std::string>();
            } else if (key == "energies") {
                cfg.energies = v.get<std::vector<double>>();
            } else if (key == "out") {
                cfg.out = v.get<std::string>();
            } else if (key == "tolerances") {
                for (const auto &[name, value] : v.items()) {
                    cfg.tolerances[name] = value.get<double>();
                }
            } else {
                throw Error(ErrorCode::invalid_argument, "unknown configuration key '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception &e) {
        throw Error(ErrorCode::invalid_argument, std::string("bad configuration value: ") + e.what());
    }
    return cfg;
}

Report to_json(const RunConfig &cfg)
{
    Report j;
    j["variant"] = to_string(cfg.variant);
    j["a"] = cfg.a;
    if (cfg.E) {
        j["energy"] = *cfg.E;
    }
    if (cfg.angle0) {
        j["angle0"] = *cfg.angle0;
        j["momentum0"] = *cfg.momentum0;
    }
    if (cfg.t_max) {
        j["t_max"] = *cfg.t_max;
    }
    j["t_steps"] = cfg.t_steps;
    j["contour_radius"] = cfg.contour_radius;
    j["contour_points"] = cfg.contour_points;
    if (cfg.p1) {
        j["p1"] = {{"re", cfg.p1->lambda.real()},
                   {"im", cfg.p1->lambda.imag()},
                   {"sheet", cfg.p1->sheet == Sheet::plus ? "+" : "-"}};
    }
    if (cfg.format) {
        j["format"] = *cfg.format == Format::csv ? "csv" : "json";
    }
    j["seed"] = cfg.seed;
    if (!cfg.inject_fault.empty()) {
        j["inject_fault"] = cfg.inject_fault;
    }
    if (!cfg.energies.empty()) {
        j["energies"] = cfg.energies;
    }
    if (!cfg.tolerances.empty()) {
        Report t = Report::object();
        for (const auto &[name, value] : cfg.tolerances) {
            t[name] = value;
        }
        j["tolerances"] = t;
    }
    return j;
}

namespace detail {

namespace {

std::shared_ptr<spdlog::logger> &logger_slot()
{
    static std::shared_ptr<spdlog::logger> slot =
        std::make_shared<spdlog::logger>("spintop", std::make_shared<spdlog::sinks::null_sink_mt>());
    return slot;
}

} // namespace

spdlog::logger &log() { return *logger_slot(); }

void set_logger(std::shared_ptr<spdlog::logger> logger) { logger_slot() = std::move(logger); }

std::string fmt17(double x)
{
    if (!std::isfinite(x)) {
        return std::isnan(x) ? "nan" : (x > 0 ? "inf" : "-inf");
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Report cj(cplx z) { return Report{{"re", z.real()}, {"im", z.imag()}}; }

RotatorState state_of(const RunConfig &cfg)
{
    if (cfg.angle0) {
        return {cfg.variant, cfg.a, *cfg.angle0, *cfg.momentum0, 0.0};
    }
    return initial_state(cfg.variant, cfg.a, cfg.E.value_or(3.0 * cfg.a * cfg.a));
}

double energy_of(const RunConfig &cfg)
{
    if (cfg.angle0) {
        return hamiltonian(state_of(cfg));
    }
    return cfg.E.value_or(3.0 * cfg.a * cfg.a);
}

void inject(CurveData &c, const std::string &fault)
{
    if (fault == "acal") {
        // a small error in the a-period, propagated the way build_curve would
        c.Acal *= 1.0 + 1e-6;
        c.alpha = two_pi_i / c.Acal;
        c.V = 2.0 * c.a * c.alpha;
    }
}

CurveData curve_of(const RunConfig &cfg, double E, int vertex_factor)
{
    CurveOptions opt;
    opt.a_cycle_vertices = std::max(8, cfg.contour_points / 4) * vertex_factor;
    CurveData c = build_curve(cfg.a, E, cfg.variant, opt);
    inject(c, cfg.inject_fault);
    return c;
}

BAContext context_of(const RunConfig &cfg, const CurveData &c, const RotatorState &s0)
{
    if (cfg.p1) {
        return build_context(c, point_at(cfg.p1->lambda, cfg.p1->sheet));
    }
    return build_context_from_state(c, s0);
}

double time_scale(const RunConfig &cfg, const RotatorState &s0)
{
    if (cfg.variant == Variant::compact) {
        return rotation_period(cfg.a, hamiltonian(s0));
    }
    return oracle::blowup_time(s0);
}

double t_max_of(const RunConfig &cfg, const RotatorState &s0)
{
    if (cfg.t_max) {
        return *cfg.t_max;
    }
    const double T = time_scale(cfg, s0);
    return cfg.variant == Variant::compact ? T : 1.5 * T;
}

std::vector<double> t_grid(double t_max, int steps)
{
    std::vector<double> out(steps);
    for (int k = 0; k < steps; ++k) {
        out[k] = t_max * k / (steps - 1);
    }
    return out;
}

Report header(const char *command, const RunConfig &cfg)
{
    Report j;
    j["command"] = command;
    j["version"] = report_version;
    j["config"] = to_json(cfg);
    return j;
}

std::string csv(const Report &metadata, const std::vector<std::string> &columns,
                const std::vector<std::vector<double>> &rows)
{
    std::string s;
    for (const auto &[key, v] : metadata.items()) {
        s += "# " + key + "=";
        s += v.is_number_float() ? fmt17(v.get<double>()) : (v.is_string() ? v.get<std::string>() : v.dump());
        s += "\n";
    }
    for (std::size_t k = 0; k < columns.size(); ++k) {
        s += (k ? "," : "") + columns[k];
    }
    s += "\n";
    for (const auto &row : rows) {
        for (std::size_t k = 0; k < row.size(); ++k) {
            s += (k ? "," : "") + fmt17(row[k]);
        }
        s += "\n";
    }
    return s;
}

Format format_of(const RunConfig &cfg, Format fallback) { return cfg.format.value_or(fallback); }

double tolerance(const RunConfig &cfg, const std::string &name)
{
    const auto it = cfg.tolerances.find(name);
    return it != cfg.tolerances.end() ? it->second : default_tolerances().at(name);
}

double rk4_step_of(double scale) { return std::min(1e-3, scale / 4096.0); }

int exit_code_for(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::modulus_invalid:
    case ErrorCode::modulus_out_of_range:
    case ErrorCode::regime_unsupported:
    case ErrorCode::lambda_zero:
    case ErrorCode::degenerate_divisor:
    case ErrorCode::branch_point_collision:
        return 2;
    case ErrorCode::canonical_window_violated:
    case ErrorCode::blow_up_detected:
        return 3;
    default:
        return 4;
    }
}

} // namespace detail

} // namespace spintop::cli
