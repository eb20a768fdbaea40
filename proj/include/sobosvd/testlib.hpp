#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sobosvd/discretization.hpp"

namespace sobosvd {

/// Closed-form (or independently computed) reference values of a case.
/// Index k is one based and follows the non-increasing order of the sigmas.
struct CaseOracle {
    std::function<double(std::size_t k)> sigma;      // same for every mode
    std::function<double(std::size_t k)> dpsi_norm;  // ||psi_k'||_0
    std::size_t rank = 0;                            // 0 when the expansion is infinite
    std::size_t valid_terms = 0;                     // 0 when every k is covered
    double l2_sq = 0.0;
    double h1_sq = 0.0;
    std::function<double(std::size_t r)> h1_tail;    // d = 2 only: sum_{k>r} sigma_k^2 (1 + 2 |psi_k'|^2)
};

struct AnalyticCase {
    std::string name;
    std::vector<double> params;
    std::size_t dim = 0;
    Sampler sampler;
    std::optional<CaseOracle> oracle;
    std::string description;

    // Samples on the unit cube with n points per mode (a single n is repeated).
    GridFunction sample_on(const std::vector<std::size_t>& n) const;
};

/**
 * Catalog on [0,1]^d.
 *
 * SEP1           sin(pi x) sin(pi y). sigma = 1/2, |psi'| = pi.
 * SINSUM(c...)   sum_k c_k sin(k pi x) sin(k pi y). sigma = |c_k|/2 sorted,
 *                |psi'| = k pi, tails from orthogonality of the sine system.
 *                Default (1, 0.5, 0.25).
 * BROWNIAN       min(x, y). sigma_k = 1/((k-1/2) pi)^2 with
 *                psi_k = sqrt2 sin((k-1/2) pi x); sum sigma^2 = 1/6 and
 *                sum sigma^2 |psi'|^2 = 1/2, so ||u||_1^2 = 7/6.
 * SEP3D          sin(pi x) sin(pi y) sin(pi z). Every mode sigma = (1/2)^(3/2).
 * SUM3D(c1,c2)   c1 s1(x)s1(y)s1(z) + c2 s2(x)s2(y)s2(z), s_k = sin(k pi .).
 *                Mode sigmas |c_k| (1/2)^(3/2). Default (1, 0.5).
 * EXPXY          exp(x y). Reference from a 48-node Gauss-Legendre Nystrom
 *                eigensolve of the kernel; derivative norms by differentiating
 *                the Nystrom interpolant. Accurate to about 1e-14 for k <= 8.
 */
AnalyticCase get_case(std::string_view name, const std::vector<double>& params);

// Accepts "NAME" or "NAME(p1,p2,...)".
AnalyticCase get_case(std::string_view spec);

std::vector<std::string> list_cases();

}  // namespace sobosvd
