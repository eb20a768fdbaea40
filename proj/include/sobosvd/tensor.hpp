#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace sobosvd {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape) noexcept;

/**
 * Dense d-way tensor, stored colexicographically (first index fastest).
 * Extents may be zero, which models an empty core after truncation to rank 0.
 */
class DenseTensor {
public:
    DenseTensor() = default;
    explicit DenseTensor(Shape shape);
    DenseTensor(Shape shape, std::vector<double> data);

    const Shape& shape() const noexcept { return shape_; }
    std::size_t order() const noexcept { return shape_.size(); }
    std::size_t size() const noexcept { return data_.size(); }
    std::size_t extent(std::size_t j) const { return shape_.at(j); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double& operator[](std::size_t flat) { return data_[flat]; }
    double operator[](std::size_t flat) const { return data_[flat]; }

    double& at(std::span<const std::size_t> index);
    double at(std::span<const std::size_t> index) const;
    std::size_t flat_index(std::span<const std::size_t> index) const;

    Eigen::Map<Eigen::VectorXd> as_vector() { return {data_.data(), static_cast<Eigen::Index>(data_.size())}; }
    Eigen::Map<const Eigen::VectorXd> as_vector() const {
        return {data_.data(), static_cast<Eigen::Index>(data_.size())};
    }

    bool all_finite() const noexcept;

private:
    Shape shape_;
    std::vector<double> data_;
};

// Steps a colex multi-index; returns false after the last index.
bool next_index(std::span<std::size_t> index, const Shape& shape) noexcept;

/// Split of the modes into row modes (alpha) and column modes (complement).
struct MatShape {
    Shape shape;                     // full tensor shape
    std::vector<std::size_t> alpha;  // ascending, zero based
    std::vector<std::size_t> complement;
    Shape row_dims;
    Shape col_dims;

    std::size_t rows() const noexcept { return shape_size(row_dims); }
    std::size_t cols() const noexcept { return shape_size(col_dims); }
};

MatShape make_matshape(const Shape& shape, std::vector<std::size_t> alpha);

struct Matricization {
    Eigen::MatrixXd matrix;
    MatShape layout;
};

Matricization matricize(const DenseTensor& t, std::vector<std::size_t> alpha);
Eigen::MatrixXd matricize_mode(const DenseTensor& t, std::size_t j);

DenseTensor dematricize(const Eigen::MatrixXd& m, const MatShape& layout);

// Contracts mode j with m: result(.., i, ..) = sum_l m(i, l) t(.., l, ..).
DenseTensor mode_product(const DenseTensor& t, const Eigen::MatrixXd& m, std::size_t j);

}  // namespace sobosvd
