#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace spintop {

using cplx = std::complex<double>;
using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx two_pi_i{0.0, 2.0 * std::numbers::pi};

enum class Variant { compact, noncompact };

/// Sign determination of w over a given lambda.
enum class Sheet { plus, minus };

inline double sign_of(Sheet s) { return s == Sheet::plus ? 1.0 : -1.0; }
inline Sheet opposite(Sheet s) { return s == Sheet::plus ? Sheet::minus : Sheet::plus; }

enum class ErrorCode {
    invalid_argument,
    modulus_invalid,
    modulus_out_of_range,
    overflow,
    pole,
    quadrature_nonconvergence,
    extrapolation_nonconvergence,
    regime_unsupported,
    sheet_tracking_failure,
    path_failure,
    identity_violation,
    lambda_zero,
    degenerate_divisor,
    canonical_window_violated,
    branch_point_collision,
    ill_conditioned_basis,
    blow_up_detected,
};

const char *to_string(ErrorCode code);

class Error : public std::runtime_error
{
public:
    Error(ErrorCode code, const std::string &what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

const char *to_string(Variant v);

} // namespace spintop
