#include "sobosvd/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "detail/refine.hpp"
#include "sobosvd/error.hpp"

namespace sobosvd {

double norm_l2(const GridFunction& f) { return std::sqrt(std::max(0.0, inner_l2(f, f))); }

double norm_ek(const GridFunction& f, std::size_t k) {
    const double l2 = norm_l2(f);
    const double dk = norm_l2(partial_derivative(f, k));
    return std::sqrt(l2 * l2 + dk * dk);
}

double norm_h1(const GridFunction& f) {
    double s = inner_l2(f, f);
    for (std::size_t k = 0; k < f.dims(); ++k) {
        const double dk = norm_l2(partial_derivative(f, k));
        s += dk * dk;
    }
    return std::sqrt(s);
}

double norm_mix(const GridFunction& f) {
    const std::size_t d = f.dims();
    if (d > 4) throw Error(ErrorCode::ModeOutOfRange, "mixed norm is limited to d <= 4");
    double s = 0.0;
    for (unsigned subset = 0; subset < (1u << d); ++subset) {
        GridFunction g = f;
        for (std::size_t k = 0; k < d; ++k) {
            if (subset & (1u << k)) g = partial_derivative(g, k);
        }
        s += inner_l2(g, g);
    }
    return std::sqrt(s);
}

double weighted_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& w) {
    return std::sqrt(w.dot(v.cwiseAbs2()));
}

std::size_t retained_count(const SingularSystem& sys) {
    if (sys.count() == 0 || !(sys.sigma(0) > 0.0)) return 0;
    const double lambda1 = sys.sigma(0) * sys.sigma(0);
    std::size_t r = 0;
    while (r < sys.count() && sys.sigma(r) * sys.sigma(r) > kRetainRel * lambda1) ++r;
    return r;
}

namespace {

void check_mode_system(const GridFunction& u, const SingularSystem& sys, std::size_t j) {
    if (j >= u.dims()) {
        throw Error(ErrorCode::ModeOutOfRange,
                    "mode " + std::to_string(j) + " for a " + std::to_string(u.dims()) + "-dimensional function");
    }
    if (sys.row_modes.size() != 1 || sys.row_modes[0] != j ||
        static_cast<std::size_t>(sys.left.rows()) != u.axis(j).size()) {
        throw Error(ErrorCode::ShapeMismatch, "singular system is not a mode-" + std::to_string(j) + " system of u");
    }
}

detail::RefinedTransfer transfer(const GridFunction& u, const SingularSystem& sys, std::size_t j, std::size_t first,
                                 std::size_t count) {
    return detail::refine_transfer(matricize_mode(u.values(), j), u.axis(j).diff_matrix(), sys, first, count);
}

}  // namespace

Eigen::VectorXd singular_derivative_operator(const GridFunction& u, const SingularSystem& sys, std::size_t j,
                                             std::size_t k) {
    check_mode_system(u, sys, j);
    // Below the retention threshold lambda_k is zero to working precision.
    if (k >= retained_count(sys)) {
        throw Error(ErrorCode::DegenerateMode, "singular value " + std::to_string(k) + " is numerically zero");
    }
    return transfer(u, sys, j, k, 1).gammas.col(0);
}

DerivativeData derivative_data(const GridFunction& u, const SingularSystem& sys, std::size_t j,
                               DerivativeDetail level) {
    check_mode_system(u, sys, j);
    const Axis& ax = u.axis(j);

    DerivativeData dd;
    dd.mode = j;
    dd.u_norm = norm_l2(u);
    dd.du_norm = norm_l2(partial_derivative(u, j));
    dd.dpsi = ax.diff_matrix() * sys.left;
    dd.dpsi_norms.resize(dd.dpsi.cols());
    for (Eigen::Index k = 0; k < dd.dpsi.cols(); ++k) dd.dpsi_norms[k] = weighted_norm(dd.dpsi.col(k), ax.weights());

    dd.retained = retained_count(sys);
    const auto r = static_cast<Eigen::Index>(dd.retained);
    dd.bound_values.resize(r);
    for (Eigen::Index k = 0; k < r; ++k) dd.bound_values[k] = dd.u_norm * dd.du_norm / (sys.sigmas[k] * sys.sigmas[k]);
    if (level == DerivativeDetail::NormsOnly) return dd;

    detail::RefinedTransfer t = transfer(u, sys, j, 0, dd.retained);
    dd.gammas = std::move(t.gammas);
    dd.transfer_errors = std::move(t.transfer_errors);
    dd.refinement_shifts = std::move(t.shifts);
    dd.gamma_norms.resize(r);
    for (Eigen::Index k = 0; k < r; ++k) dd.gamma_norms[k] = weighted_norm(dd.gammas.col(k), ax.weights());
    return dd;
}

double DerivativeData::max_transfer_error() const {
    return transfer_errors.size() ? transfer_errors.maxCoeff() : 0.0;
}

double DerivativeData::max_bound_excess() const {
    const auto r = static_cast<Eigen::Index>(retained);
    if (r == 0) return -std::numeric_limits<double>::infinity();
    double worst = (dpsi_norms.head(r) - bound_values.head(r)).maxCoeff();
    if (has_operator_data()) worst = std::max(worst, (gamma_norms - bound_values.head(r)).maxCoeff());
    return worst;
}

}  // namespace sobosvd
