#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <spdlog/sinks/ostream_sink.h>

#include "common.hpp"

namespace spintop::cli {

using namespace detail;

namespace {

std::shared_ptr<spdlog::logger> make_logger(std::ostream &err)
{
    auto logger = std::make_shared<spdlog::logger>(
        "spintop", std::make_shared<spdlog::sinks::ostream_sink_mt>(err, true));
    logger->set_pattern("[%l] %v");
    spdlog::level::level_enum level = spdlog::level::warn;
    if (const char *env = std::getenv("SPINTOP_LOG")) {
        const std::string name(env);
        level = spdlog::level::from_str(name);
        // from_str maps anything unknown to off; warn instead of going silent
        if (level == spdlog::level::off && name != "off") {
            level = spdlog::level::warn;
        }
    }
    logger->set_level(level);
    return logger;
}

struct LoggerScope {
    explicit LoggerScope(std::ostream &err) { set_logger(make_logger(err)); }
    ~LoggerScope()
    {
        set_logger(std::make_shared<spdlog::logger>("spintop", spdlog::sinks_init_list{}));
    }
};

nlohmann::json read_config(const std::string &path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::invalid_argument, "cannot open configuration '" + path + "'");
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::invalid_argument, std::string("configuration is not JSON: ") + e.what());
    }
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    LoggerScope scope(err);

    CLI::App app{"Algebro-geometric solution and verification of the SO(2) spinning top", "spintop"};
    app.require_subcommand(1, 1);

    std::string config_path, variant, format, p1, fault, out_path;
    double a = 0, energy = 0, angle0 = 0, momentum0 = 0, t_max = 0, radius = 0;
    int t_steps = 0, points = 0;
    std::uint64_t seed = 0;
    std::vector<double> energies;

    app.add_option("--config", config_path, "JSON file with any of the options below");
    auto *o_variant = app.add_option("--variant", variant, "compact or noncompact")
                          ->check(CLI::IsMember({"compact", "noncompact"}));
    auto *o_a = app.add_option("--a", a, "coupling a > 0");
    auto *o_energy = app.add_option("--energy", energy, "energy E (default 3 a^2)");
    auto *o_angle = app.add_option("--angle0", angle0, "initial angle, instead of --energy");
    auto *o_momentum = app.add_option("--momentum0", momentum0, "initial momentum, with --angle0");
    auto *o_tmax = app.add_option("--t-max", t_max, "end of the time grid");
    auto *o_steps = app.add_option("--t-steps", t_steps, "number of time samples (>= 2)");
    auto *o_radius = app.add_option("--contour-radius", radius, "radius of the lambda contour");
    auto *o_points = app.add_option("--contour-points", points, "points on the lambda contour (>= 8)");
    auto *o_p1 = app.add_option("--p1", p1, "divisor override re,im,+ or re,im,-");
    auto *o_format = app.add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    auto *o_out = app.add_option("--out", out_path, "write to this file instead of standard output");
    auto *o_seed = app.add_option("--seed", seed, "seed for randomized probes");
    auto *o_fault = app.add_option("--inject-fault", fault, "deliberately corrupt a quantity (acal)")
                        ->check(CLI::IsMember({"acal"}));
    auto *o_energies =
        app.add_option("--energies", energies, "energy grid for scan, comma separated")->delimiter(',');

    const std::vector<std::pair<const char *, const char *>> commands{
        {"curve", "spectral curve, periods and identity residuals (JSON)"},
        {"solve", "sin^2 / sinh^2 time series from three independent routes (CSV)"},
        {"factorize", "factorization exp(tL) = g+^-1 g- on a lambda contour (JSON)"},
        {"verify", "invariant suite with measured residuals (JSON)"},
        {"scan", "curve data over a grid of energies, computed in parallel (CSV)"},
    };
    for (const auto &[name, help] : commands) {
        app.add_subcommand(name, help)->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        RunConfig cfg;
        if (!config_path.empty()) {
            cfg = merge_json(cfg, read_config(config_path));
        }
        if (*o_variant) {
            cfg.variant = variant == "compact" ? Variant::compact : Variant::noncompact;
        }
        if (*o_a) {
            cfg.a = a;
        }
        // initial data given on the command line replaces that of the file
        if (*o_energy || *o_angle || *o_momentum) {
            cfg.E.reset();
            cfg.angle0.reset();
            cfg.momentum0.reset();
        }
        if (*o_energy) {
            cfg.E = energy;
        }
        if (*o_angle) {
            cfg.angle0 = angle0;
        }
        if (*o_momentum) {
            cfg.momentum0 = momentum0;
        }
        if (*o_tmax) {
            cfg.t_max = t_max;
        }
        if (*o_steps) {
            cfg.t_steps = t_steps;
        }
        if (*o_radius) {
            cfg.contour_radius = radius;
        }
        if (*o_points) {
            cfg.contour_points = points;
        }
        if (*o_p1) {
            cfg.p1 = parse_p1(p1);
        }
        if (*o_format) {
            cfg.format = format == "csv" ? Format::csv : Format::json;
        }
        if (*o_out) {
            cfg.out = out_path;
        }
        if (*o_seed) {
            cfg.seed = seed;
        }
        if (*o_fault) {
            cfg.inject_fault = fault;
        }
        if (*o_energies) {
            cfg.energies = energies;
        }

        const std::string cmd = app.get_subcommands().front()->get_name();
        CommandOutput result;
        if (cmd == "curve") {
            result = cmd_curve(cfg);
        } else if (cmd == "solve") {
            result = cmd_solve(cfg);
        } else if (cmd == "factorize") {
            result = cmd_factorize(cfg);
        } else if (cmd == "verify") {
            result = cmd_verify(cfg);
        } else {
            result = cmd_scan(cfg);
        }

        if (cfg.out.empty()) {
            out << result.text;
        } else {
            std::ofstream file(cfg.out, std::ios::binary);
            file << result.text;
            if (!file) {
                throw Error(ErrorCode::invalid_argument, "cannot write '" + cfg.out + "'");
            }
        }
        if (result.exit_code != 0) {
            log().warn("{} finished with exit code {}", cmd, result.exit_code);
        }
        return result.exit_code;
    } catch (const Error &e) {
        err << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception &e) {
        err << "internal error: " << e.what() << "\n";
        return 4;
    }
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    std::vector<const char *> argv{"spintop"};
    for (const auto &s : args) {
        argv.push_back(s.c_str());
    }
    return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

} // namespace spintop::cli
