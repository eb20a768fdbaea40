#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sobosvd/tensor.hpp"

namespace sobosvd {

enum class Scheme { UniformTrapezoidFd2 };

/**
 * One spatial dimension: nodes, trapezoid weights and a second-order
 * differentiation matrix. Immutable once built; share it through AxisPtr.
 */
class Axis {
public:
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return upper_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(nodes_.size()); }
    double spacing() const noexcept { return (upper_ - lower_) / static_cast<double>(size() - 1); }
    Scheme scheme() const noexcept { return scheme_; }

    const Eigen::VectorXd& nodes() const noexcept { return nodes_; }
    const Eigen::VectorXd& weights() const noexcept { return weights_; }
    const Eigen::MatrixXd& diff_matrix() const noexcept { return diff_; }

    // Two axes describe the same discrete space.
    bool same_as(const Axis& other) const noexcept;

private:
    friend Axis make_axis_value(std::size_t n, double lower, double upper);

    double lower_ = 0.0;
    double upper_ = 1.0;
    Scheme scheme_ = Scheme::UniformTrapezoidFd2;
    Eigen::VectorXd nodes_;
    Eigen::VectorXd weights_;
    Eigen::MatrixXd diff_;
};

using AxisPtr = std::shared_ptr<const Axis>;

// Uniform grid on [lower, upper] with n >= 3 nodes.
AxisPtr make_axis(std::size_t n, double lower, double upper);

// Convenience: n_j nodes per mode on the unit cube.
std::vector<AxisPtr> unit_axes(std::span<const std::size_t> sizes);

/// Samples of a function on a tensor-product grid.
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::vector<AxisPtr> axes, DenseTensor values);

    std::size_t dims() const noexcept { return axes_.size(); }
    const std::vector<AxisPtr>& axes() const noexcept { return axes_; }
    const Axis& axis(std::size_t j) const { return *axes_.at(j); }
    const DenseTensor& values() const noexcept { return values_; }

    // Same grid, new values (shape must match).
    GridFunction with_values(DenseTensor values) const;

    bool same_grid(const GridFunction& other) const noexcept;

private:
    std::vector<AxisPtr> axes_;
    DenseTensor values_;
};

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double alpha, const GridFunction& f);

using Sampler = std::function<double(std::span<const double>)>;

GridFunction sample(const Sampler& f, const std::vector<AxisPtr>& axes);

// Weighted L2 inner product (tensor trapezoid rule).
double inner_l2(const GridFunction& f, const GridFunction& g);

// Applies the mode-j differentiation matrix (j is zero based).
GridFunction partial_derivative(const GridFunction& f, std::size_t j);

// Kronecker product of the weights of the listed modes, first listed mode
// varying fastest.
Eigen::VectorXd kron_weights(const std::vector<AxisPtr>& axes, std::span<const std::size_t> modes);

}  // namespace sobosvd
