#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "sobosvd/discretization.hpp"
#include "sobosvd/tensor.hpp"

namespace sobosvd {

inline constexpr double kDefaultRankTol = 1e-12;

/**
 * Singular system of a weighted matricization.
 *
 * Columns of `left` are the psi_k on the row grid and are orthonormal in the
 * row-weighted inner product; `right` holds the phi_k likewise. The function
 * values are recovered as sum_k sigma_k psi_k phi_k^T.
 */
struct SingularSystem {
    std::vector<std::size_t> row_modes;  // alpha, zero based
    std::vector<std::size_t> col_modes;  // complement of alpha
    Eigen::VectorXd sigmas;              // non-increasing
    Eigen::MatrixXd left;
    Eigen::MatrixXd right;
    Eigen::VectorXd row_weights;
    Eigen::VectorXd col_weights;

    std::size_t count() const noexcept { return static_cast<std::size_t>(sigmas.size()); }
    double sigma(std::size_t k) const { return sigmas[static_cast<Eigen::Index>(k)]; }

    // The system of the transposed matricization (rows and columns swapped).
    SingularSystem transposed() const;

    // sum_{k < r} sigma_k psi_k phi_k^T as a matrix on the row x column grid.
    Eigen::MatrixXd reconstruct(std::size_t r) const;
};

SingularSystem weighted_svd(const Eigen::MatrixXd& m, const Eigen::VectorXd& w_row, const Eigen::VectorXd& w_col);

// SVD of the mode-j matricization with quadrature weights on both sides.
SingularSystem mode_svd(const GridFunction& u, std::size_t j);

// Number of sigma_k strictly above tol_rel * sigma_1 (0 for the zero system).
std::size_t numerical_rank(const SingularSystem& sys, double tol_rel = kDefaultRankTol);

struct HosvdSystem {
    std::vector<SingularSystem> modes;
    std::vector<std::size_t> ranks;
    DenseTensor core;  // coefficients in the truncated mode bases

    // core x_1 Psi_1 ... x_d Psi_d.
    DenseTensor reconstruct() const;
};

HosvdSystem hosvd(const GridFunction& u, double tol_rel = kDefaultRankTol);

// Weighted Frobenius norm sqrt(sum w_row_i w_col_j m_ij^2).
double weighted_frobenius(const Eigen::MatrixXd& m, const Eigen::VectorXd& w_row, const Eigen::VectorXd& w_col);

}  // namespace sobosvd
