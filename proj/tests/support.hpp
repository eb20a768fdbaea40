#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "sobosvd/discretization.hpp"
#include "sobosvd/error.hpp"

namespace sobosvd::test {

inline constexpr double pi = std::numbers::pi;

#define EXPECT_ERROR_CODE(stmt, expected)                                  \
    do {                                                                   \
        try {                                                              \
            stmt;                                                          \
            ADD_FAILURE() << "no exception from " #stmt;                   \
        } catch (const ::sobosvd::Error& e) {                              \
            EXPECT_EQ(e.code(), expected) << e.what();                     \
        }                                                                  \
    } while (0)

inline GridFunction on_unit_grid(std::vector<std::size_t> n, const Sampler& f) {
    return sample(f, unit_axes(n));
}

inline DenseTensor random_tensor(const Shape& shape, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    DenseTensor t(shape);
    for (double& x : t.data()) x = nd(rng);
    return t;
}

inline GridFunction random_function(const Shape& shape, unsigned seed) {
    return GridFunction(unit_axes(shape), random_tensor(shape, seed));
}

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
    return (a.as_vector() - b.as_vector()).cwiseAbs().maxCoeff();
}

}  // namespace sobosvd::test
