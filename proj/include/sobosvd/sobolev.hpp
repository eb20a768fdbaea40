#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "sobosvd/discretization.hpp"
#include "sobosvd/svd.hpp"

namespace sobosvd {

// Singular triples with lambda_k = sigma_k^2 <= kRetainRel * lambda_1 get no
// derivative-operator data: 1/lambda_k turns rounding into noise there.
inline constexpr double kRetainRel = 1e-14;

double norm_l2(const GridFunction& f);
double norm_ek(const GridFunction& f, std::size_t k);
double norm_h1(const GridFunction& f);
// All 2^d mixed derivatives; d <= 4.
double norm_mix(const GridFunction& f);

// Weighted L2 norm of a nodal vector.
double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w);

// Number of retained triples, lambda_k > kRetainRel * lambda_1.
std::size_t retained_count(const SingularSystem& sys);

// gamma_k = (1/lambda_k) M_j(d_j u) W_c M_j(u)^T W_r psi_k.
//
// Evaluated in double-double on psi_k polished to that precision: in plain
// double the 1/lambda_k factor amplifies the eigen-residual of the computed
// singular vector by lambda_1/lambda_k.
Eigen::VectorXd singular_derivative_operator(const GridFunction& u, const SingularSystem& sys, std::size_t j,
                                             std::size_t k);

/// Derivative information attached to the left vectors of a mode-j system.
struct DerivativeData {
    std::size_t mode = 0;
    double u_norm = 0.0;        // ||u||_0
    double du_norm = 0.0;       // ||d_j u||_0
    Eigen::MatrixXd dpsi;       // D_j psi_k, every k
    Eigen::VectorXd dpsi_norms; // ||D_j psi_k||_0, every k

    std::size_t retained = 0;
    Eigen::MatrixXd gammas;           // operator formula, retained k only
    Eigen::VectorXd gamma_norms;
    Eigen::VectorXd bound_values;     // (1/lambda_k) ||u||_0 ||d_j u||_0
    Eigen::VectorXd transfer_errors;  // ||gamma_k - D psi_k||_0 / max(||D psi_k||_0, 1)
    Eigen::VectorXd refinement_shifts;  // ||psi_k(polished) - psi_k(stored)||_0

    bool has_operator_data() const noexcept { return gammas.cols() == static_cast<Eigen::Index>(retained); }
    double max_transfer_error() const;
    // max over retained k of ||D psi_k|| - bound (and ||gamma_k|| - bound); -inf when nothing is retained.
    double max_bound_excess() const;
};

enum class DerivativeDetail {
    Full,       // everything, including the polished operator images gamma_k
    NormsOnly,  // D psi_k, norms and bounds; skips gamma_k (cheap for large rank sweeps)
};

// sys must be a single-mode system with row mode j (mode_svd, or the
// transposed mode-0 system when d = 2).
DerivativeData derivative_data(const GridFunction& u, const SingularSystem& sys, std::size_t j,
                               DerivativeDetail detail = DerivativeDetail::Full);

}  // namespace sobosvd
