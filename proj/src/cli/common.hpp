#pragma once

// Shared plumbing of the subcommands.

#include <spdlog/logger.h>

#include "spintop/baker_akhiezer.hpp"
#include "spintop/cli.hpp"
#include "spintop/spectral_curve.hpp"

namespace spintop::cli::detail {

inline constexpr int report_version = 1;

spdlog::logger &log();
void set_logger(std::shared_ptr<spdlog::logger> logger);

std::string fmt17(double x);
Report cj(cplx z);

/// Initial state from E or from (angle0, momentum0).
RotatorState state_of(const RunConfig &cfg);
/// Energy of the initial state (equal to E when E is given).
double energy_of(const RunConfig &cfg);

/// Curve with the a-cycle polygon resolution tied to contour_points, with the
/// requested fault applied.
CurveData curve_of(const RunConfig &cfg, double E, int vertex_factor = 1);
void inject(CurveData &c, const std::string &fault);

BAContext context_of(const RunConfig &cfg, const CurveData &c, const RotatorState &s0);

/// One rotation period (compact) or the closed-form blow-up time (noncompact).
double time_scale(const RunConfig &cfg, const RotatorState &s0);
double t_max_of(const RunConfig &cfg, const RotatorState &s0);
std::vector<double> t_grid(double t_max, int steps);

Report header(const char *command, const RunConfig &cfg);

/// Comment lines and a header row, then rows formatted with fmt17.
std::string csv(const Report &metadata, const std::vector<std::string> &columns,
                const std::vector<std::vector<double>> &rows);

Format format_of(const RunConfig &cfg, Format fallback);

/// Configured value of a named tolerance, or its default.
double tolerance(const RunConfig &cfg, const std::string &name);

/// RK4 step for the oracles: 1/4096 of the time scale, at most 1e-3.
double rk4_step_of(double scale);

int exit_code_for(ErrorCode code);

} // namespace spintop::cli::detail
