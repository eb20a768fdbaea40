#include "sobosvd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "sobosvd/error.hpp"

namespace sobosvd {

std::size_t shape_size(const Shape& shape) noexcept {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

DenseTensor::DenseTensor(Shape shape) : shape_(std::move(shape)), data_(shape_size(shape_), 0.0) {}

DenseTensor::DenseTensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != shape_size(shape_)) {
        throw Error(ErrorCode::ShapeMismatch, "data length " + std::to_string(data_.size()) +
                                                  " does not match shape size " +
                                                  std::to_string(shape_size(shape_)));
    }
}

std::size_t DenseTensor::flat_index(std::span<const std::size_t> index) const {
    if (index.size() != shape_.size()) throw Error(ErrorCode::ShapeMismatch, "index order mismatch");
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t j = 0; j < shape_.size(); ++j) {
        if (index[j] >= shape_[j]) throw Error(ErrorCode::ShapeMismatch, "index out of range");
        flat += index[j] * stride;
        stride *= shape_[j];
    }
    return flat;
}

double& DenseTensor::at(std::span<const std::size_t> index) { return data_[flat_index(index)]; }
double DenseTensor::at(std::span<const std::size_t> index) const { return data_[flat_index(index)]; }

bool DenseTensor::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

bool next_index(std::span<std::size_t> index, const Shape& shape) noexcept {
    for (std::size_t j = 0; j < index.size(); ++j) {
        if (++index[j] < shape[j]) return true;
        index[j] = 0;
    }
    return false;
}

MatShape make_matshape(const Shape& shape, std::vector<std::size_t> alpha) {
    const std::size_t d = shape.size();
    std::sort(alpha.begin(), alpha.end());
    alpha.erase(std::unique(alpha.begin(), alpha.end()), alpha.end());
    if (alpha.empty() || alpha.size() >= d || alpha.back() >= d) {
        throw Error(ErrorCode::InvalidAlpha, "alpha must be a nonempty proper subset of the " +
                                                 std::to_string(d) + " modes");
    }
    MatShape ms;
    ms.shape = shape;
    ms.alpha = std::move(alpha);
    for (std::size_t j = 0; j < d; ++j) {
        if (std::binary_search(ms.alpha.begin(), ms.alpha.end(), j)) {
            ms.row_dims.push_back(shape[j]);
        } else {
            ms.complement.push_back(j);
            ms.col_dims.push_back(shape[j]);
        }
    }
    return ms;
}

namespace {

// Strides of the row and column flattenings, indexed by tensor mode.
void split_strides(const MatShape& ms, std::vector<std::size_t>& row_stride, std::vector<std::size_t>& col_stride) {
    const std::size_t d = ms.shape.size();
    row_stride.assign(d, 0);
    col_stride.assign(d, 0);
    std::size_t s = 1;
    for (std::size_t j : ms.alpha) {
        row_stride[j] = s;
        s *= ms.shape[j];
    }
    s = 1;
    for (std::size_t j : ms.complement) {
        col_stride[j] = s;
        s *= ms.shape[j];
    }
}

}  // namespace

Matricization matricize(const DenseTensor& t, std::vector<std::size_t> alpha) {
    MatShape ms = make_matshape(t.shape(), std::move(alpha));
    Eigen::MatrixXd m(ms.rows(), ms.cols());
    if (t.size() > 0) {
        std::vector<std::size_t> rs, cs;
        split_strides(ms, rs, cs);
        std::vector<std::size_t> idx(t.order(), 0);
        std::size_t flat = 0;
        do {
            std::size_t r = 0, c = 0;
            for (std::size_t j = 0; j < idx.size(); ++j) {
                r += idx[j] * rs[j];
                c += idx[j] * cs[j];
            }
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = t[flat++];
        } while (next_index(idx, t.shape()));
    }
    return {std::move(m), std::move(ms)};
}

Eigen::MatrixXd matricize_mode(const DenseTensor& t, std::size_t j) {
    if (j >= t.order()) throw Error(ErrorCode::ModeOutOfRange, "mode " + std::to_string(j));
    if (t.order() == 1) {
        // Degenerate single-mode case: a column vector.
        return t.as_vector();
    }
    const auto& sh = t.shape();
    std::size_t left = 1, right = 1;
    for (std::size_t i = 0; i < j; ++i) left *= sh[i];
    for (std::size_t i = j + 1; i < sh.size(); ++i) right *= sh[i];
    const std::size_t n = sh[j];
    Eigen::MatrixXd m(n, left * right);
    for (std::size_t r = 0; r < right; ++r) {
        for (std::size_t i = 0; i < n; ++i) {
            const double* src = t.data().data() + left * (i + n * r);
            for (std::size_t l = 0; l < left; ++l) {
                m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(l + left * r)) = src[l];
            }
        }
    }
    return m;
}

DenseTensor dematricize(const Eigen::MatrixXd& m, const MatShape& ms) {
    if (static_cast<std::size_t>(m.rows()) != ms.rows() || static_cast<std::size_t>(m.cols()) != ms.cols()) {
        throw Error(ErrorCode::ShapeMismatch, "matrix is " + std::to_string(m.rows()) + "x" +
                                                  std::to_string(m.cols()) + ", layout expects " +
                                                  std::to_string(ms.rows()) + "x" + std::to_string(ms.cols()));
    }
    DenseTensor t(ms.shape);
    if (t.size() == 0) return t;
    std::vector<std::size_t> rs, cs;
    split_strides(ms, rs, cs);
    std::vector<std::size_t> idx(t.order(), 0);
    std::size_t flat = 0;
    do {
        std::size_t r = 0, c = 0;
        for (std::size_t j = 0; j < idx.size(); ++j) {
            r += idx[j] * rs[j];
            c += idx[j] * cs[j];
        }
        t[flat++] = m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    } while (next_index(idx, t.shape()));
    return t;
}

DenseTensor mode_product(const DenseTensor& t, const Eigen::MatrixXd& m, std::size_t j) {
    if (j >= t.order()) throw Error(ErrorCode::ModeOutOfRange, "mode " + std::to_string(j));
    const auto& sh = t.shape();
    if (static_cast<std::size_t>(m.cols()) != sh[j]) {
        throw Error(ErrorCode::ShapeMismatch, "matrix has " + std::to_string(m.cols()) +
                                                  " columns but mode " + std::to_string(j) + " has extent " +
                                                  std::to_string(sh[j]));
    }
    std::size_t left = 1, right = 1;
    for (std::size_t i = 0; i < j; ++i) left *= sh[i];
    for (std::size_t i = j + 1; i < sh.size(); ++i) right *= sh[i];
    const auto n = static_cast<Eigen::Index>(sh[j]);
    const auto rows = m.rows();

    Shape out_shape = sh;
    out_shape[j] = static_cast<std::size_t>(rows);
    DenseTensor out(out_shape);
    if (out.size() == 0 || t.size() == 0) return out;

    const auto L = static_cast<Eigen::Index>(left);
    for (std::size_t r = 0; r < right; ++r) {
        Eigen::Map<const Eigen::MatrixXd> slab(t.data().data() + left * sh[j] * r, L, n);
        Eigen::Map<Eigen::MatrixXd> dst(out.data().data() + left * static_cast<std::size_t>(rows) * r, L, rows);
        dst.noalias() = slab * m.transpose();
    }
    return out;
}

}  // namespace sobosvd
