#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sobosvd/discretization.hpp"
#include "sobosvd/sobolev.hpp"
#include "sobosvd/svd.hpp"

namespace sobosvd {

// Values at or below this are left out of log-log fits.
inline constexpr double kFitFloor = 1e-13;

struct RateFit {
    std::vector<double> xs;  // points actually used
    std::vector<double> ys;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

// Least squares line through (log2 x, log2 y) for y > kFitFloor.
RateFit rate_fit(std::span<const double> xs, std::span<const double> ys);

// Fits log2 Gamma(2^l) against l for l = 0..max_level.
RateFit bernstein_exponent(const SingularSystem& sys, const DerivativeData& deriv, std::size_t max_level);

struct JacksonEstimate {
    std::vector<double> dims;    // 2^l
    std::vector<double> errors;  // max over probes of ||p - P_l p||_0 / ||p||_1
    std::optional<RateFit> fit;  // absent when fewer than three errors clear kFitFloor
};

// Probes are one-dimensional functions on the row grid of sys.
JacksonEstimate jackson_exponent(const SingularSystem& sys, const std::vector<GridFunction>& probes,
                                 std::size_t max_level);

enum class ConvergenceFlag { Converged, Undecided, Diverging };

std::string_view to_string(ConvergenceFlag flag);

/**
 * Classifies the partial sums s_1, s_2, ... of a rank sweep (entry i belongs to
 * rank i + 1).
 *
 * - converged: the last two increments are below 1e-8 of the last value, or the
 *   increments over the second half decay faster than r^-1.1 (summable tail).
 * - diverging: the increments over the last four sums are non-decreasing and the last value
 *   exceeds ten times the first.
 * - undecided otherwise.
 *
 * Thresholds are policy, not theory.
 */
ConvergenceFlag h1_convergence_flag(std::span<const double> partial_sums);

}  // namespace sobosvd
