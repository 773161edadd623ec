#include "spintop/types.hpp"

namespace spintop {

const char *to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::invalid_argument: return "invalid-argument";
    case ErrorCode::modulus_invalid: return "modulus-invalid";
    case ErrorCode::modulus_out_of_range: return "modulus-out-of-range";
    case ErrorCode::overflow: return "overflow";
    case ErrorCode::pole: return "pole";
    case ErrorCode::quadrature_nonconvergence: return "quadrature-nonconvergence";
    case ErrorCode::extrapolation_nonconvergence: return "extrapolation-nonconvergence";
    case ErrorCode::regime_unsupported: return "regime-unsupported";
    case ErrorCode::sheet_tracking_failure: return "sheet-tracking-failure";
    case ErrorCode::path_failure: return "path-crosses-cut";
    case ErrorCode::identity_violation: return "identity-violation";
    case ErrorCode::lambda_zero: return "lambda-zero";
    case ErrorCode::degenerate_divisor: return "degenerate-divisor";
    case ErrorCode::canonical_window_violated: return "canonical-window-violated";
    case ErrorCode::branch_point_collision: return "branch-point-collision";
    case ErrorCode::ill_conditioned_basis: return "ill-conditioned-basis";
    case ErrorCode::blow_up_detected: return "blow-up-detected";
    }
    return "unknown";
}

const char *to_string(Variant v) { return v == Variant::compact ? "compact" : "noncompact"; }

} // namespace spintop
