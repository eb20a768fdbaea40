#include "sobosvd/discretization.hpp"

#include <cmath>
#include <string>

#include "sobosvd/error.hpp"

namespace sobosvd {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidAxis: return "invalid-axis";
        case ErrorCode::Sampling: return "sampling";
        case ErrorCode::AxisMismatch: return "axis-mismatch";
        case ErrorCode::ModeOutOfRange: return "mode-out-of-range";
        case ErrorCode::InvalidAlpha: return "invalid-alpha";
        case ErrorCode::ShapeMismatch: return "shape-mismatch";
        case ErrorCode::NonFinite: return "non-finite";
        case ErrorCode::InvalidWeights: return "invalid-weights";
        case ErrorCode::DegenerateMode: return "degenerate-mode";
        case ErrorCode::InvalidRank: return "invalid-rank";
        case ErrorCode::MissingDerivativeData: return "missing-derivative-data";
        case ErrorCode::InsufficientRank: return "insufficient-rank";
        case ErrorCode::EmptyProbes: return "empty-probes";
        case ErrorCode::TooFewPoints: return "too-few-points";
        case ErrorCode::DegenerateInput: return "degenerate-input";
        case ErrorCode::UnknownCase: return "unknown-case";
        case ErrorCode::Config: return "config";
        case ErrorCode::Io: return "io";
    }
    return "unknown";
}

Axis make_axis_value(std::size_t n, double lower, double upper) {
    if (n < 3) throw Error(ErrorCode::InvalidAxis, "need at least 3 nodes, got " + std::to_string(n));
    if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
        throw Error(ErrorCode::InvalidAxis, "lower bound must be below upper bound");
    }
    Axis a;
    a.lower_ = lower;
    a.upper_ = upper;
    const auto N = static_cast<Eigen::Index>(n);
    const double h = (upper - lower) / static_cast<double>(n - 1);

    a.nodes_.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) a.nodes_[i] = lower + h * static_cast<double>(i);
    a.nodes_[N - 1] = upper;

    a.weights_ = Eigen::VectorXd::Constant(N, h);
    a.weights_[0] = a.weights_[N - 1] = 0.5 * h;

    // Central differences inside, 3-point one-sided stencils at the ends.
    a.diff_ = Eigen::MatrixXd::Zero(N, N);
    const double c = 1.0 / (2.0 * h);
    a.diff_(0, 0) = -3.0 * c;
    a.diff_(0, 1) = 4.0 * c;
    a.diff_(0, 2) = -1.0 * c;
    for (Eigen::Index i = 1; i + 1 < N; ++i) {
        a.diff_(i, i - 1) = -c;
        a.diff_(i, i + 1) = c;
    }
    a.diff_(N - 1, N - 1) = 3.0 * c;
    a.diff_(N - 1, N - 2) = -4.0 * c;
    a.diff_(N - 1, N - 3) = 1.0 * c;
    return a;
}

AxisPtr make_axis(std::size_t n, double lower, double upper) {
    return std::make_shared<const Axis>(make_axis_value(n, lower, upper));
}

std::vector<AxisPtr> unit_axes(std::span<const std::size_t> sizes) {
    std::vector<AxisPtr> axes;
    axes.reserve(sizes.size());
    for (std::size_t n : sizes) axes.push_back(make_axis(n, 0.0, 1.0));
    return axes;
}

bool Axis::same_as(const Axis& other) const noexcept {
    return this == &other ||
           (size() == other.size() && lower_ == other.lower_ && upper_ == other.upper_ && scheme_ == other.scheme_);
}

GridFunction::GridFunction(std::vector<AxisPtr> axes, DenseTensor values)
    : axes_(std::move(axes)), values_(std::move(values)) {
    if (axes_.empty()) throw Error(ErrorCode::ShapeMismatch, "grid function needs at least one axis");
    if (values_.order() != axes_.size()) throw Error(ErrorCode::ShapeMismatch, "tensor order differs from axis count");
    for (std::size_t j = 0; j < axes_.size(); ++j) {
        if (!axes_[j]) throw Error(ErrorCode::InvalidAxis, "null axis");
        if (values_.extent(j) != axes_[j]->size()) {
            throw Error(ErrorCode::ShapeMismatch, "mode " + std::to_string(j) + " has " +
                                                      std::to_string(values_.extent(j)) + " values but axis has " +
                                                      std::to_string(axes_[j]->size()) + " nodes");
        }
    }
    if (!values_.all_finite()) throw Error(ErrorCode::NonFinite, "grid function has non-finite entries");
}

GridFunction GridFunction::with_values(DenseTensor values) const { return GridFunction(axes_, std::move(values)); }

bool GridFunction::same_grid(const GridFunction& other) const noexcept {
    if (axes_.size() != other.axes_.size()) return false;
    for (std::size_t j = 0; j < axes_.size(); ++j) {
        if (!axes_[j]->same_as(*other.axes_[j])) return false;
    }
    return true;
}

namespace {

GridFunction combine(const GridFunction& a, double beta, const GridFunction& b) {
    if (!a.same_grid(b)) throw Error(ErrorCode::AxisMismatch, "functions live on different grids");
    DenseTensor out = a.values();
    out.as_vector() += beta * b.values().as_vector();
    return a.with_values(std::move(out));
}

}  // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) { return combine(a, 1.0, b); }
GridFunction operator-(const GridFunction& a, const GridFunction& b) { return combine(a, -1.0, b); }

GridFunction operator*(double alpha, const GridFunction& f) {
    DenseTensor out = f.values();
    out.as_vector() *= alpha;
    return f.with_values(std::move(out));
}

GridFunction sample(const Sampler& f, const std::vector<AxisPtr>& axes) {
    if (axes.empty()) throw Error(ErrorCode::Sampling, "no axes given");
    Shape shape;
    for (const auto& a : axes) shape.push_back(a->size());
    DenseTensor values(shape);
    std::vector<std::size_t> idx(shape.size(), 0);
    std::vector<double> x(shape.size());
    std::size_t flat = 0;
    do {
        for (std::size_t j = 0; j < idx.size(); ++j) x[j] = axes[j]->nodes()[static_cast<Eigen::Index>(idx[j])];
        const double v = f(x);
        if (!std::isfinite(v)) {
            std::string where;
            for (std::size_t j = 0; j < idx.size(); ++j) where += (j ? "," : "") + std::to_string(idx[j]);
            throw Error(ErrorCode::Sampling, "non-finite value at index (" + where + ")");
        }
        values[flat++] = v;
    } while (next_index(idx, shape));
    return GridFunction(axes, std::move(values));
}

Eigen::VectorXd kron_weights(const std::vector<AxisPtr>& axes, std::span<const std::size_t> modes) {
    Eigen::VectorXd w = Eigen::VectorXd::Ones(1);
    for (std::size_t j : modes) {
        const Eigen::VectorXd& wj = axes.at(j)->weights();
        Eigen::VectorXd next(w.size() * wj.size());
        // Earlier modes vary fastest.
        for (Eigen::Index b = 0; b < wj.size(); ++b) next.segment(b * w.size(), w.size()) = w * wj[b];
        w = std::move(next);
    }
    return w;
}

double inner_l2(const GridFunction& f, const GridFunction& g) {
    if (!f.same_grid(g)) throw Error(ErrorCode::AxisMismatch, "inner product of functions on different grids");
    // Contract one mode at a time with its weights.
    const auto& sh = f.values().shape();
    Eigen::ArrayXd prod = f.values().as_vector().array() * g.values().as_vector().array();
    std::size_t block = prod.size();
    for (std::size_t j = sh.size(); j-- > 0;) {
        // Mode j is the slowest-varying among the remaining ones.
        const std::size_t n = sh[j];
        const std::size_t inner = block / n;
        Eigen::ArrayXd next = Eigen::ArrayXd::Zero(static_cast<Eigen::Index>(inner));
        const auto& w = f.axis(j).weights();
        for (std::size_t i = 0; i < n; ++i) {
            next += w[static_cast<Eigen::Index>(i)] *
                    prod.segment(static_cast<Eigen::Index>(i * inner), static_cast<Eigen::Index>(inner));
        }
        prod = std::move(next);
        block = inner;
    }
    return prod[0];
}

GridFunction partial_derivative(const GridFunction& f, std::size_t j) {
    if (j >= f.dims()) {
        throw Error(ErrorCode::ModeOutOfRange,
                    "mode " + std::to_string(j) + " for a " + std::to_string(f.dims()) + "-dimensional function");
    }
    return f.with_values(mode_product(f.values(), f.axis(j).diff_matrix(), j));
}

}  // namespace sobosvd
