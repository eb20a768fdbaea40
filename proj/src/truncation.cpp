#include "sobosvd/truncation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "sobosvd/error.hpp"
#include "sobosvd/parallel.hpp"

namespace sobosvd {

SobolevAnalysis analyze(const GridFunction& u, DerivativeDetail detail) {
    const std::size_t d = u.dims();
    SobolevAnalysis a;
    a.u = u;
    a.modes.resize(d);
    a.derivs.resize(d);
    a.ek_sq.resize(d);
    parallel_for(d, [&](std::size_t j) {
        a.modes[j] = mode_svd(u, j);
        a.derivs[j] = derivative_data(u, a.modes[j], j, detail);
    });
    if (d == 2) a.right_deriv = derivative_data(u, a.modes[0].transposed(), 1, detail);

    a.l2_sq = inner_l2(u, u);
    a.h1_sq = a.l2_sq;
    for (std::size_t j = 0; j < d; ++j) {
        const double dj = a.derivs[j].du_norm;
        a.ek_sq[j] = a.l2_sq + dj * dj;
        a.h1_sq += dj * dj;
    }
    return a;
}

SobolevAnalysis analyze(const GridFunction& u) { return analyze(u, DerivativeDetail::Full); }

GridFunction truncate_svd(const GridFunction& u, const SingularSystem& sys, std::size_t r) {
    if (u.dims() != 2 || sys.row_modes != std::vector<std::size_t>{0}) {
        throw Error(ErrorCode::ShapeMismatch, "truncate_svd needs a 2-d function and its mode-0 system");
    }
    if (r > sys.count()) {
        throw Error(ErrorCode::InvalidRank,
                    "rank " + std::to_string(r) + " exceeds the " + std::to_string(sys.count()) + " singular triples");
    }
    const Eigen::MatrixXd m = sys.reconstruct(r);
    DenseTensor t(u.values().shape());
    t.as_vector() = Eigen::Map<const Eigen::VectorXd>(m.data(), m.size());
    return u.with_values(std::move(t));
}

H1Identity h1_identity(const SingularSystem& sys, const DerivativeData& left, const DerivativeData& right,
                       std::size_t r) {
    const auto n = static_cast<Eigen::Index>(sys.count());
    if (left.dpsi_norms.size() < n || right.dpsi_norms.size() < n) {
        throw Error(ErrorCode::MissingDerivativeData, "derivative data does not cover every singular triple");
    }
    H1Identity out;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double s2 = sys.sigmas[k] * sys.sigmas[k];
        const double term =
            s2 * (1.0 + left.dpsi_norms[k] * left.dpsi_norms[k] + right.dpsi_norms[k] * right.dpsi_norms[k]);
        (static_cast<std::size_t>(k) < r ? out.urrep_value : out.tail_error_value) += term;
    }
    return out;
}

Eigen::MatrixXd mode_projector(const SingularSystem& sys, std::size_t r) {
    const auto k = static_cast<Eigen::Index>(std::min(r, sys.count()));
    const auto psi = sys.left.leftCols(k);
    return psi * (psi.transpose() * sys.row_weights.asDiagonal());
}

GridFunction project_mode(const GridFunction& u, const SingularSystem& sys, std::size_t j, std::size_t r) {
    return u.with_values(mode_product(u.values(), mode_projector(sys, r), j));
}

EkIdentity ek_identity(const SobolevAnalysis& a, std::size_t j, std::size_t r) {
    if (j >= a.dims()) throw Error(ErrorCode::ModeOutOfRange, "mode " + std::to_string(j));
    const SingularSystem& sys = a.modes[j];
    const DerivativeData& dd = a.derivs[j];
    EkIdentity out;
    for (Eigen::Index k = 0; k < sys.sigmas.size(); ++k) {
        const double term = sys.sigmas[k] * sys.sigmas[k] * (1.0 + dd.dpsi_norms[k] * dd.dpsi_norms[k]);
        (static_cast<std::size_t>(k) < r ? out.norm_value : out.tail_value) += term;
    }
    const GridFunction proj = project_mode(a.u, sys, j, r);
    const double pn = norm_ek(proj, j);
    const double tn = norm_ek(a.u - proj, j);
    out.norm_measured = pn * pn;
    out.tail_measured = tn * tn;
    return out;
}

EkIdentity ek_identity(const GridFunction& u, std::size_t j, std::size_t r) {
    if (j >= u.dims()) throw Error(ErrorCode::ModeOutOfRange, "mode " + std::to_string(j));
    SobolevAnalysis a;
    a.u = u;
    a.modes.resize(u.dims());
    a.derivs.resize(u.dims());
    a.modes[j] = mode_svd(u, j);
    a.derivs[j] = derivative_data(u, a.modes[j], j, DerivativeDetail::NormsOnly);
    return ek_identity(a, j, r);
}

namespace {

void check_ranks(const GridFunction& u, const RankVector& ranks) {
    if (ranks.size() != u.dims()) {
        throw Error(ErrorCode::InvalidRank, "rank vector has " + std::to_string(ranks.size()) + " entries for a " +
                                                std::to_string(u.dims()) + "-dimensional function");
    }
    for (std::size_t j = 0; j < ranks.size(); ++j) {
        if (ranks[j] > u.axis(j).size()) {
            throw Error(ErrorCode::InvalidRank, "rank " + std::to_string(ranks[j]) + " exceeds mode " +
                                                    std::to_string(j) + " size " + std::to_string(u.axis(j).size()));
        }
    }
}

TuckerApprox assemble(const GridFunction& u, std::vector<Eigen::MatrixXd> factors) {
    TuckerApprox t;
    t.core = u.values();
    for (std::size_t j = 0; j < factors.size(); ++j) {
        t.ranks.push_back(static_cast<std::size_t>(factors[j].cols()));
        t.core = mode_product(t.core, factors[j].transpose() * u.axis(j).weights().asDiagonal(), j);
    }
    DenseTensor full = t.core;
    for (std::size_t j = 0; j < factors.size(); ++j) full = mode_product(full, factors[j], j);
    t.factors = std::move(factors);
    t.projected = u.with_values(std::move(full));
    return t;
}

}  // namespace

TuckerApprox hosvd_project(const GridFunction& u, const std::vector<SingularSystem>& modes, const RankVector& ranks) {
    check_ranks(u, ranks);
    std::vector<Eigen::MatrixXd> factors(u.dims());
    for (std::size_t j = 0; j < u.dims(); ++j) {
        // Beyond the available vectors the mode-j fibres are already captured.
        const auto r = static_cast<Eigen::Index>(std::min(ranks[j], modes.at(j).count()));
        factors[j] = modes[j].left.leftCols(r);
    }
    return assemble(u, std::move(factors));
}

TuckerApprox hosvd_project(const GridFunction& u, const RankVector& ranks) {
    check_ranks(u, ranks);
    std::vector<SingularSystem> modes(u.dims());
    parallel_for(u.dims(), [&](std::size_t j) { modes[j] = mode_svd(u, j); });
    return hosvd_project(u, modes, ranks);
}

HooiResult hooi(const GridFunction& u, const RankVector& ranks, std::size_t max_iters, double tol) {
    check_ranks(u, ranks);
    const std::size_t d = u.dims();

    // Work in sqrt-weight scaled coordinates where the weighted problem is Euclidean.
    std::vector<Eigen::VectorXd> scale(d);
    DenseTensor scaled = u.values();
    for (std::size_t j = 0; j < d; ++j) {
        scale[j] = u.axis(j).weights().cwiseSqrt();
        scaled = mode_product(scaled, Eigen::MatrixXd(scale[j].asDiagonal()), j);
    }
    const double total = scaled.as_vector().squaredNorm();

    HooiResult result;
    if (std::find(ranks.begin(), ranks.end(), std::size_t{0}) != ranks.end()) {
        result.approx = hosvd_project(u, ranks);
        result.error_history.push_back(total);
        return result;
    }
    std::vector<Eigen::MatrixXd> basis(d);
    {
        const TuckerApprox init = hosvd_project(u, ranks);
        for (std::size_t j = 0; j < d; ++j) basis[j] = scale[j].asDiagonal() * init.factors[j];
    }
    auto error_of = [&](const std::vector<Eigen::MatrixXd>& b) {
        DenseTensor core = scaled;
        for (std::size_t j = 0; j < d; ++j) core = mode_product(core, b[j].transpose(), j);
        return std::max(0.0, total - core.as_vector().squaredNorm());
    };

    double best = error_of(basis);
    std::vector<Eigen::MatrixXd> best_basis = basis;
    result.error_history.push_back(best);

    double previous = best;
    for (std::size_t it = 0; it < max_iters; ++it) {
        for (std::size_t j = 0; j < d; ++j) {
            DenseTensor y = scaled;
            for (std::size_t i = 0; i < d; ++i) {
                if (i != j) y = mode_product(y, basis[i].transpose(), i);
            }
            const Eigen::MatrixXd yj = matricize_mode(y, j);
            const auto r = static_cast<Eigen::Index>(basis[j].cols());
            const bool full = r > std::min(yj.rows(), yj.cols());
            Eigen::BDCSVD<Eigen::MatrixXd> svd(yj, full ? Eigen::ComputeFullU : Eigen::ComputeThinU);
            basis[j] = svd.matrixU().leftCols(r);
        }
        const double err = error_of(basis);
        result.error_history.push_back(err);
        result.iterations = it + 1;
        if (err < best) {
            best = err;
            best_basis = basis;
        }
        if (std::abs(previous - err) <= tol * std::max(total, std::numeric_limits<double>::min())) break;
        previous = err;
    }

    std::vector<Eigen::MatrixXd> factors(d);
    for (std::size_t j = 0; j < d; ++j) factors[j] = scale[j].cwiseInverse().asDiagonal() * best_basis[j];
    result.approx = assemble(u, std::move(factors));
    return result;
}

double gamma_constant(const Axis& axis, const Eigen::MatrixXd& vectors, std::size_t r) {
    if (r == 0) throw Error(ErrorCode::InvalidRank, "Gamma needs r >= 1");
    if (r > static_cast<std::size_t>(vectors.cols())) {
        throw Error(ErrorCode::InvalidRank, "only " + std::to_string(vectors.cols()) + " vectors available");
    }
    const Eigen::MatrixXd dpsi = axis.diff_matrix() * vectors.leftCols(static_cast<Eigen::Index>(r));
    const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dpsi.cols(), dpsi.cols()) +
                              dpsi.transpose() * axis.weights().asDiagonal() * dpsi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b, Eigen::EigenvaluesOnly);
    return std::sqrt(eig.eigenvalues().maxCoeff());
}

double gamma_constant(const SingularSystem& sys, const DerivativeData& deriv, std::size_t r) {
    if (r == 0) throw Error(ErrorCode::InvalidRank, "Gamma needs r >= 1");
    if (r > static_cast<std::size_t>(deriv.dpsi.cols())) {
        throw Error(ErrorCode::InvalidRank, "only " + std::to_string(deriv.dpsi.cols()) + " vectors available");
    }
    const auto dpsi = deriv.dpsi.leftCols(static_cast<Eigen::Index>(r));
    const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(dpsi.cols(), dpsi.cols()) +
                              dpsi.transpose() * sys.row_weights.asDiagonal() * dpsi;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(b, Eigen::EigenvaluesOnly);
    return std::sqrt(eig.eigenvalues().maxCoeff());
}

std::optional<double> ErrorReport::quasi_opt_slack() const {
    if (!bounds.quasi_opt_reference) return std::nullopt;
    return *bounds.quasi_opt_reference - measured.l2_sq;
}

bool ErrorReport::sandwich_holds(double slack) const {
    return norm_lower_slack() >= -slack && norm_upper_slack() >= -slack && h1_lower_slack() >= -slack &&
           h1_upper_slack() >= -slack;
}

ErrorReport h1_sandwich(const SobolevAnalysis& a, const RankVector& ranks, bool with_hooi) {
    const std::size_t d = a.dims();
    check_ranks(a.u, ranks);

    ErrorReport rep;
    rep.ranks = ranks;
    rep.gammas.assign(d, std::numeric_limits<double>::quiet_NaN());

    std::vector<double> head(d, 0.0), head1(d, 0.0), tail(d, 0.0), tail1(d, 0.0), gamma_sq(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) {
        const SingularSystem& sys = a.modes[j];
        const DerivativeData& dd = a.derivs[j];
        const std::size_t r = std::min(ranks[j], sys.count());
        for (Eigen::Index k = 0; k < sys.sigmas.size(); ++k) {
            const double s2 = sys.sigmas[k] * sys.sigmas[k];
            const double s2h = s2 * (1.0 + dd.dpsi_norms[k] * dd.dpsi_norms[k]);
            if (static_cast<std::size_t>(k) < r) {
                head[j] += s2;
                head1[j] += s2h;
            } else {
                tail[j] += s2;
                tail1[j] += s2h;
            }
        }
        if (r > 0) {
            rep.gammas[j] = gamma_constant(sys, dd, r);
            gamma_sq[j] = rep.gammas[j] * rep.gammas[j];
        }
    }

    auto& b = rep.bounds;
    for (std::size_t j = 0; j < d; ++j) {
        b.hosvd_l2_tail_sum += tail[j];
        b.h1_lower = std::max(b.h1_lower, tail1[j]);
        b.h1_upper += tail[j] + tail1[j];
        b.norm_lower += head[j] / static_cast<double>(d);
        b.norm_upper += head1[j];
        double others = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            if (i != j) others += gamma_sq[i];
        }
        b.limit_partial_sum += head1[j] + head[j] * others;
    }
    rep.formula.ek_norm = head1;
    rep.formula.ek_tail = tail1;
    if (d == 2 && a.right_deriv) {
        const H1Identity id = h1_identity(a.modes[0], a.derivs[0], *a.right_deriv, std::min(ranks[0], ranks[1]));
        rep.formula.urrep_value = id.urrep_value;
        rep.formula.tail_error_value = id.tail_error_value;
    }

    const TuckerApprox t = hosvd_project(a.u, a.modes, ranks);
    const GridFunction residual = a.u - t.projected;
    rep.measured.l2_sq = inner_l2(residual, residual);
    const double h1r = norm_h1(residual);
    const double h1p = norm_h1(t.projected);
    rep.measured.h1_sq = h1r * h1r;
    rep.measured.proj_h1_sq = h1p * h1p;
    rep.measured.ek_sq.resize(d);
    for (std::size_t j = 0; j < d; ++j) {
        const double e = norm_ek(residual, j);
        rep.measured.ek_sq[j] = e * e;
    }

    if (with_hooi) {
        const HooiResult h = hooi(a.u, ranks);
        b.quasi_opt_reference = static_cast<double>(d) * h.error_sq();
    }
    return rep;
}

ErrorReport h1_sandwich(const GridFunction& u, const RankVector& ranks) { return h1_sandwich(analyze(u), ranks); }

}  // namespace sobosvd
