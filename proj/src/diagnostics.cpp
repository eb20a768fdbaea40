#include "sobosvd/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sobosvd/error.hpp"
#include "sobosvd/truncation.hpp"

namespace sobosvd {

namespace {

// Increments decaying faster than r^kSummableSlope are treated as summable.
constexpr double kSummableSlope = -1.1;

RateFit fit_log2(std::vector<double> xs, std::vector<double> ys) {
    const auto n = static_cast<double>(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log2(xs[i]);
        my += std::log2(ys[i]);
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log2(xs[i]) - mx;
        const double dy = std::log2(ys[i]) - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateInput, "rate fit needs at least two distinct x values");
    RateFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    fit.xs = std::move(xs);
    fit.ys = std::move(ys);
    return fit;
}

}  // namespace

RateFit rate_fit(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size()) {
        throw Error(ErrorCode::DegenerateInput, "rate fit got " + std::to_string(xs.size()) + " x values and " +
                                                    std::to_string(ys.size()) + " y values");
    }
    std::vector<double> fx, fy;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (ys[i] > kFitFloor && xs[i] > 0.0 && std::isfinite(ys[i]) && std::isfinite(xs[i])) {
            fx.push_back(xs[i]);
            fy.push_back(ys[i]);
        }
    }
    if (fx.size() < 3) {
        throw Error(ErrorCode::DegenerateInput,
                    "rate fit needs 3 positive values, got " + std::to_string(fx.size()));
    }
    return fit_log2(std::move(fx), std::move(fy));
}

RateFit bernstein_exponent(const SingularSystem& sys, const DerivativeData& deriv, std::size_t max_level) {
    const std::size_t need = std::size_t{1} << max_level;
    const std::size_t rank = numerical_rank(sys);
    if (rank < need || rank < 2) {
        throw Error(ErrorCode::InsufficientRank, "Bernstein estimate up to level " + std::to_string(max_level) +
                                                     " needs rank " + std::to_string(std::max<std::size_t>(need, 2)) +
                                                     ", have " + std::to_string(rank));
    }
    std::vector<double> xs, ys;
    for (std::size_t l = 0; l <= max_level; ++l) {
        const std::size_t r = std::size_t{1} << l;
        xs.push_back(static_cast<double>(r));
        ys.push_back(gamma_constant(sys, deriv, r));
    }
    return fit_log2(std::move(xs), std::move(ys));
}

JacksonEstimate jackson_exponent(const SingularSystem& sys, const std::vector<GridFunction>& probes,
                                 std::size_t max_level) {
    if (probes.empty()) throw Error(ErrorCode::EmptyProbes, "Jackson estimate needs at least one probe");
    const std::size_t top = std::size_t{1} << max_level;
    if (top > sys.count()) {
        throw Error(ErrorCode::InsufficientRank, "level " + std::to_string(max_level) + " needs " +
                                                     std::to_string(top) + " vectors, have " +
                                                     std::to_string(sys.count()));
    }
    const auto n = static_cast<Eigen::Index>(sys.left.rows());
    const Eigen::VectorXd& w = sys.row_weights;

    std::vector<Eigen::VectorXd> values;
    std::vector<double> h1;
    for (const GridFunction& p : probes) {
        if (p.dims() != 1 || static_cast<Eigen::Index>(p.axis(0).size()) != n) {
            throw Error(ErrorCode::ShapeMismatch, "probe must be one-dimensional on the row grid");
        }
        values.push_back(p.values().as_vector());
        h1.push_back(norm_h1(p));
    }

    JacksonEstimate est;
    for (std::size_t l = 0; l <= max_level; ++l) {
        const auto r = static_cast<Eigen::Index>(std::size_t{1} << l);
        const auto psi = sys.left.leftCols(r);
        double worst = 0.0;
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (!(h1[i] > 0.0)) continue;
            const Eigen::VectorXd coef = psi.transpose() * w.cwiseProduct(values[i]);
            const Eigen::VectorXd res = values[i] - psi * coef;
            worst = std::max(worst, weighted_norm(res, w) / h1[i]);
        }
        est.dims.push_back(static_cast<double>(r));
        est.errors.push_back(worst);
    }
    const auto usable = std::count_if(est.errors.begin(), est.errors.end(), [](double e) { return e > kFitFloor; });
    if (usable >= 3) est.fit = rate_fit(est.dims, est.errors);
    return est;
}

std::string_view to_string(ConvergenceFlag flag) {
    switch (flag) {
        case ConvergenceFlag::Converged: return "converged";
        case ConvergenceFlag::Undecided: return "undecided";
        case ConvergenceFlag::Diverging: return "diverging";
    }
    return "undecided";
}

ConvergenceFlag h1_convergence_flag(std::span<const double> s) {
    if (s.size() < 4) {
        throw Error(ErrorCode::TooFewPoints, "convergence flag needs 4 partial sums, got " + std::to_string(s.size()));
    }
    const std::size_t m = s.size();
    const double last = s[m - 1];
    std::vector<double> inc(m - 1);
    for (std::size_t i = 1; i < m; ++i) inc[i - 1] = std::abs(s[i] - s[i - 1]);

    const double small = 1e-8 * std::abs(last);
    if (inc[m - 2] <= small && inc[m - 3] <= small) return ConvergenceFlag::Converged;

    const bool growing = inc[m - 4] <= inc[m - 3] && inc[m - 3] <= inc[m - 2];
    if (growing && last > 10.0 * s[0]) return ConvergenceFlag::Diverging;

    // Increment i belongs to rank i + 2; fit the second half of the sweep.
    std::vector<double> xs, ys;
    for (std::size_t i = (m - 1) / 2; i < m - 1; ++i) {
        xs.push_back(static_cast<double>(i + 2));
        ys.push_back(inc[i] / std::abs(last));
    }
    if (std::count_if(ys.begin(), ys.end(), [](double y) { return y > kFitFloor; }) >= 3) {
        const RateFit fit = rate_fit(xs, ys);
        if (fit.slope < kSummableSlope) return ConvergenceFlag::Converged;
    }
    return ConvergenceFlag::Undecided;
}

}  // namespace sobosvd
