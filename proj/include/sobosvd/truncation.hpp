#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "sobosvd/discretization.hpp"
#include "sobosvd/sobolev.hpp"
#include "sobosvd/svd.hpp"

namespace sobosvd {

using RankVector = std::vector<std::size_t>;

// Absolute slack used when checking the sandwich and tail-sum inequalities.
inline constexpr double kBoundSlack = 1e-9;

/// Per-mode singular systems and derivative data of one function, computed once
/// and reused across rank sweeps.
struct SobolevAnalysis {
    GridFunction u;
    std::vector<SingularSystem> modes;
    std::vector<DerivativeData> derivs;
    // d = 2 only: derivative data of the right vectors of modes[0].
    std::optional<DerivativeData> right_deriv;

    double l2_sq = 0.0;
    double h1_sq = 0.0;
    std::vector<double> ek_sq;

    std::size_t dims() const noexcept { return u.dims(); }
};

SobolevAnalysis analyze(const GridFunction& u);
SobolevAnalysis analyze(const GridFunction& u, DerivativeDetail detail);

struct TuckerApprox {
    RankVector ranks;                     // effective ranks (clamped to available vectors)
    std::vector<Eigen::MatrixXd> factors; // first r_j weighted-orthonormal vectors per mode
    DenseTensor core;
    GridFunction projected;
};

// u_r = sum_{k<r} sigma_k psi_k (x) phi_k for a two-dimensional u and its mode-0 system.
GridFunction truncate_svd(const GridFunction& u, const SingularSystem& sys, std::size_t r);

struct H1Identity {
    double urrep_value = 0.0;       // sum_{k<=r} sigma_k^2 (1 + |psi_k'|^2 + |phi_k'|^2)
    double tail_error_value = 0.0;  // same sum over k > r
};

// Both derivative data objects must cover every triple of sys.
H1Identity h1_identity(const SingularSystem& sys, const DerivativeData& left, const DerivativeData& right,
                       std::size_t r);

struct EkIdentity {
    double norm_value = 0.0;     // sum_{k<=r} sigma_k^2 (1 + |psi_k'|^2)
    double tail_value = 0.0;     // sum_{k>r}
    double norm_measured = 0.0;  // ||P^j u||_{e_j}^2
    double tail_measured = 0.0;  // ||u - P^j u||_{e_j}^2
};

EkIdentity ek_identity(const GridFunction& u, std::size_t j, std::size_t r);
EkIdentity ek_identity(const SobolevAnalysis& a, std::size_t j, std::size_t r);

// Weighted orthogonal projector Psi_r Psi_r^T W onto the first r vectors of sys.
Eigen::MatrixXd mode_projector(const SingularSystem& sys, std::size_t r);

// Applies P^j_{r_j} only on mode j.
GridFunction project_mode(const GridFunction& u, const SingularSystem& sys, std::size_t j, std::size_t r);

TuckerApprox hosvd_project(const GridFunction& u, const RankVector& ranks);
TuckerApprox hosvd_project(const GridFunction& u, const std::vector<SingularSystem>& modes, const RankVector& ranks);

struct HooiResult {
    TuckerApprox approx;
    std::vector<double> error_history;  // ||u - u_r||_0^2 after init and each sweep
    std::size_t iterations = 0;

    double error_sq() const { return error_history.empty() ? 0.0 : error_history.back(); }
};

// Alternating dominant-subspace iteration started from the HOSVD factors.
HooiResult hooi(const GridFunction& u, const RankVector& ranks, std::size_t max_iters = 50, double tol = 1e-12);

// Gamma_j(r) = sup over span{psi_1..psi_r} of ||v||_1 / ||v||_0.
double gamma_constant(const SingularSystem& sys, const DerivativeData& deriv, std::size_t r);
double gamma_constant(const Axis& axis, const Eigen::MatrixXd& vectors, std::size_t r);

/// Measured norms next to the closed-form values and bounds for one rank vector.
struct ErrorReport {
    RankVector ranks;

    struct Measured {
        double l2_sq = 0.0;        // ||u - u_r||_0^2
        double h1_sq = 0.0;        // ||u - u_r||_1^2
        double proj_h1_sq = 0.0;   // ||u_r||_1^2
        std::vector<double> ek_sq; // ||u - P^j u||_{e_j}^2
    } measured;

    struct Formula {
        std::optional<double> urrep_value;       // d = 2, r = min(r_1, r_2)
        std::optional<double> tail_error_value;  // d = 2
        std::vector<double> ek_norm;
        std::vector<double> ek_tail;
    } formula;

    struct Bounds {
        double hosvd_l2_tail_sum = 0.0;  // sum_j sum_{k>r_j} sigma^2
        std::optional<double> quasi_opt_reference;  // d * HOOI error^2
        double h1_lower = 0.0;           // max_j sum_{k>r_j} sigma^2 (1 + |psi'|^2)
        double h1_upper = 0.0;           // sum_j sum_{k>r_j} sigma^2 (2 + |psi'|^2)
        double norm_lower = 0.0;         // (1/d) sum_j sum_{k<=r_j} sigma^2
        double norm_upper = 0.0;         // sum_j sum_{k<=r_j} sigma^2 (1 + |psi'|^2)
        double limit_partial_sum = 0.0;  // adds sum_{i!=j} Gamma_i^2(r_i)
    } bounds;

    std::vector<double> gammas;  // Gamma_j(r_j), NaN where r_j = 0

    // Slack: bound minus measured (>= -kBoundSlack when the inequality holds).
    double hosvd_bound_slack() const { return bounds.hosvd_l2_tail_sum - measured.l2_sq; }
    double norm_lower_slack() const { return measured.proj_h1_sq - bounds.norm_lower; }
    double norm_upper_slack() const { return bounds.norm_upper - measured.proj_h1_sq; }
    double h1_lower_slack() const { return measured.h1_sq - bounds.h1_lower; }
    double h1_upper_slack() const { return bounds.h1_upper - measured.h1_sq; }
    std::optional<double> quasi_opt_slack() const;

    bool sandwich_holds(double slack = kBoundSlack) const;
};

ErrorReport h1_sandwich(const GridFunction& u, const RankVector& ranks);
ErrorReport h1_sandwich(const SobolevAnalysis& a, const RankVector& ranks, bool with_hooi = false);

}  // namespace sobosvd
