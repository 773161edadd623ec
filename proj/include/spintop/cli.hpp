#pragma once

// Command-line front end: configuration, the five subcommands and their
// report formats. Reports are JSON, time series CSV; every float is written
// with 17 significant digits so that output round-trips exactly.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "spintop/types.hpp"

namespace spintop::cli {

using Report = nlohmann::ordered_json;

enum class Format { csv, json };

struct P1Override {
    cplx lambda;
    Sheet sheet = Sheet::plus;
};

struct RunConfig {
    Variant variant = Variant::compact;
    double a = 1.0;
    std::optional<double> E;  // defaults to 3 a^2 when no state is given
    std::optional<double> angle0, momentum0;
    std::optional<double> t_max;  // default: one period, or 1.5 t* (noncompact)
    int t_steps = 33;
    double contour_radius = 1.0;
    int contour_points = 64;
    std::optional<P1Override> p1;
    std::map<std::string, double> tolerances;  // overrides of default_tolerances()
    std::optional<Format> format;              // default per command
    std::uint64_t seed = 1;
    std::string inject_fault;  // "" or "acal"
    std::vector<double> energies;  // scan grid; default {1.5, 2, 3, 5, 10} a^2
    std::string out;               // empty: standard output
};

/// Named thresholds used by `verify`.
const std::map<std::string, double> &default_tolerances();

/// Throws Error(invalid_argument) on a violated invariant.
void validate(const RunConfig &cfg);

/// Fields present in j replace those of base. Unknown keys are rejected.
RunConfig merge_json(RunConfig base, const nlohmann::json &j);

Report to_json(const RunConfig &cfg);

/// "re,im,sheet" with sheet "+" or "-".
P1Override parse_p1(const std::string &s);

struct CommandOutput {
    std::string text;
    int exit_code = 0;
};

CommandOutput cmd_curve(const RunConfig &cfg);
CommandOutput cmd_solve(const RunConfig &cfg);
CommandOutput cmd_factorize(const RunConfig &cfg);
CommandOutput cmd_verify(const RunConfig &cfg);
CommandOutput cmd_scan(const RunConfig &cfg);

/// JSON text with every double printed as %.17g; non-finite values become null.
std::string dump17(const Report &j, int indent = 2);

/// Exit codes: 0 ok, 2 invalid or unsupported input, 3 non-canonical
/// factorization, 4 internal identity violation.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace spintop::cli
