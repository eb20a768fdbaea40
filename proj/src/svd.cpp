#include "sobosvd/svd.hpp"

#include <cmath>
#include <string>

#include <Eigen/SVD>

#include "sobosvd/error.hpp"
#include "sobosvd/parallel.hpp"

namespace sobosvd {

namespace {

void check_weights(const Eigen::VectorXd& w, Eigen::Index expected, const char* side) {
    if (w.size() != expected) {
        throw Error(ErrorCode::ShapeMismatch, std::string(side) + " weights have length " + std::to_string(w.size()) +
                                                  ", expected " + std::to_string(expected));
    }
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        if (!(w[i] > 0.0) || !std::isfinite(w[i])) {
            throw Error(ErrorCode::InvalidWeights, std::string(side) + " weight " + std::to_string(i) +
                                                       " is not a positive finite number");
        }
    }
}

// Index of the largest-magnitude entry; near-ties (relative 1e-10) go to the
// lowest index so the choice survives last-bit noise.
Eigen::Index pivot_index(const Eigen::Ref<const Eigen::VectorXd>& v) {
    const double top = v.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) >= top * (1.0 - 1e-10)) return i;
    }
    return 0;
}

}  // namespace

SingularSystem SingularSystem::transposed() const {
    SingularSystem t;
    t.row_modes = col_modes;
    t.col_modes = row_modes;
    t.sigmas = sigmas;
    t.left = right;
    t.right = left;
    t.row_weights = col_weights;
    t.col_weights = row_weights;
    return t;
}

Eigen::MatrixXd SingularSystem::reconstruct(std::size_t r) const {
    const auto k = static_cast<Eigen::Index>(std::min(r, count()));
    return left.leftCols(k) * sigmas.head(k).asDiagonal() * right.leftCols(k).transpose();
}

double weighted_frobenius(const Eigen::MatrixXd& m, const Eigen::VectorXd& w_row, const Eigen::VectorXd& w_col) {
    return std::sqrt((w_row.transpose() * m.array().square().matrix() * w_col).value());
}

SingularSystem weighted_svd(const Eigen::MatrixXd& m, const Eigen::VectorXd& w_row, const Eigen::VectorXd& w_col) {
    check_weights(w_row, m.rows(), "row");
    check_weights(w_col, m.cols(), "column");
    if (!m.allFinite()) throw Error(ErrorCode::NonFinite, "matrix has non-finite entries");

    const Eigen::VectorXd sr = w_row.cwiseSqrt();
    const Eigen::VectorXd sc = w_col.cwiseSqrt();
    const Eigen::MatrixXd scaled = sr.asDiagonal() * m * sc.asDiagonal();

    Eigen::BDCSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);

    SingularSystem sys;
    sys.sigmas = svd.singularValues();
    sys.left = sr.cwiseInverse().asDiagonal() * svd.matrixU();
    sys.right = sc.cwiseInverse().asDiagonal() * svd.matrixV();
    sys.row_weights = w_row;
    sys.col_weights = w_col;

    for (Eigen::Index k = 0; k < sys.sigmas.size(); ++k) {
        const Eigen::Index p = pivot_index(sys.left.col(k));
        if (sys.left(p, k) < 0.0) {
            sys.left.col(k) *= -1.0;
            sys.right.col(k) *= -1.0;
        }
    }
    return sys;
}

SingularSystem mode_svd(const GridFunction& u, std::size_t j) {
    const std::size_t d = u.dims();
    if (j >= d) {
        throw Error(ErrorCode::ModeOutOfRange,
                    "mode " + std::to_string(j) + " for a " + std::to_string(d) + "-dimensional function");
    }
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < d; ++i) {
        if (i != j) others.push_back(i);
    }
    const Eigen::MatrixXd m = matricize_mode(u.values(), j);
    const Eigen::VectorXd wc = others.empty() ? Eigen::VectorXd::Ones(1) : kron_weights(u.axes(), others);
    SingularSystem sys = weighted_svd(m, u.axis(j).weights(), wc);
    sys.row_modes = {j};
    sys.col_modes = std::move(others);
    return sys;
}

std::size_t numerical_rank(const SingularSystem& sys, double tol_rel) {
    if (sys.count() == 0 || !(sys.sigma(0) > 0.0)) return 0;
    const double cut = tol_rel * sys.sigma(0);
    std::size_t r = 0;
    while (r < sys.count() && sys.sigma(r) > cut) ++r;
    return r;
}

DenseTensor HosvdSystem::reconstruct() const {
    DenseTensor t = core;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        t = mode_product(t, modes[j].left.leftCols(static_cast<Eigen::Index>(ranks[j])), j);
    }
    return t;
}

HosvdSystem hosvd(const GridFunction& u, double tol_rel) {
    const std::size_t d = u.dims();
    if (d < 2) throw Error(ErrorCode::ShapeMismatch, "HOSVD needs at least two modes");
    HosvdSystem h;
    h.modes.resize(d);
    parallel_for(d, [&](std::size_t j) { h.modes[j] = mode_svd(u, j); });

    h.ranks.resize(d);
    for (std::size_t j = 0; j < d; ++j) h.ranks[j] = numerical_rank(h.modes[j], tol_rel);

    // Analysis transform: coefficients against the weighted-orthonormal frames.
    h.core = u.values();
    for (std::size_t j = 0; j < d; ++j) {
        const auto r = static_cast<Eigen::Index>(h.ranks[j]);
        const Eigen::MatrixXd analysis =
            h.modes[j].left.leftCols(r).transpose() * u.axis(j).weights().asDiagonal();
        h.core = mode_product(h.core, analysis, j);
    }
    return h;
}

}  // namespace sobosvd
