#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "sobosvd/svd.hpp"

namespace sobosvd::detail {

/**
 * Left singular vectors of a weighted matricization polished to
 * double-double accuracy, together with the derivative-operator images.
 *
 * With G = M W_c M^T W_r, each psi_k is refined as an eigenvector of G
 * (Rayleigh quotient plus corrections expanded in the double-precision
 * basis), then gamma_k = D G psi_k / lambda_k, which is the operator
 * formula with M(d u) = D M(u). All of this runs in double-double so that
 * the 1/lambda_k factor does not amplify double rounding.
 */
struct RefinedTransfer {
    Eigen::MatrixXd psi;              // refined vectors, rounded to double
    Eigen::VectorXd lambdas;          // Rayleigh quotients
    Eigen::MatrixXd gammas;           // rounded to double
    Eigen::VectorXd transfer_errors;  // ||gamma - D psi||_0 / max(||D psi||_0, 1), double-double
    Eigen::VectorXd shifts;           // ||psi_refined - psi_input||_0
};

RefinedTransfer refine_transfer(const Eigen::MatrixXd& m, const Eigen::MatrixXd& diff, const SingularSystem& sys,
                                std::size_t first, std::size_t count);

}  // namespace sobosvd::detail
