#include <cmath>

#include <gtest/gtest.h>

#include "sobosvd/sobolev.hpp"
#include "support.hpp"

using namespace sobosvd;
using sobosvd::test::on_unit_grid;
using sobosvd::test::pi;

namespace {

double sep1(std::span<const double> x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); }

double sinsum3(std::span<const double> x) {
    const double c[] = {1.0, 0.5, 0.25};
    double s = 0.0;
    for (int k = 1; k <= 3; ++k) s += c[k - 1] * std::sin(k * pi * x[0]) * std::sin(k * pi * x[1]);
    return s;
}

}  // namespace

TEST(Norms, ConstantFunction) {
    const GridFunction f = on_unit_grid({17, 17}, [](std::span<const double>) { return 1.0; });
    EXPECT_NEAR(norm_l2(f), 1.0, 1e-12);
    EXPECT_NEAR(norm_h1(f), 1.0, 1e-12);
    EXPECT_NEAR(norm_mix(f), 1.0, 1e-12);
}

TEST(Norms, SineProduct) {
    const GridFunction f = on_unit_grid({257, 257}, sep1);
    EXPECT_NEAR(norm_h1(f), std::sqrt((1.0 + 2.0 * pi * pi) / 4.0), 1e-3);
    const double ek = norm_ek(f, 0);
    EXPECT_NEAR(ek * ek, 0.25 + pi * pi / 4.0, 1e-3);
    // Mixed norm adds ||d_x d_y f||^2 = pi^4 / 4.
    const double mix = norm_mix(f);
    EXPECT_NEAR(mix * mix, (1.0 + 2.0 * pi * pi + std::pow(pi, 4)) / 4.0, 1e-2);
}

TEST(Norms, ChainHolds) {
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const GridFunction f = test::random_function({6, 5, 4}, seed);
        const double l2 = norm_l2(f), h1 = norm_h1(f), mix = norm_mix(f);
        for (std::size_t k = 0; k < 3; ++k) {
            const double ek = norm_ek(f, k);
            EXPECT_GE(ek - l2, -1e-12);
            EXPECT_GE(h1 - ek, -1e-12);
        }
        EXPECT_GE(mix - h1, -1e-12);
    }
}

TEST(Norms, ModeOutOfRange) {
    EXPECT_ERROR_CODE(norm_ek(test::random_function({4, 4}, 1), 2), ErrorCode::ModeOutOfRange);
}

TEST(Norms, MixedNormCappedAtFourDimensions) {
    EXPECT_NO_THROW(norm_mix(test::random_function({3, 3, 3, 3}, 1)));
    EXPECT_ERROR_CODE(norm_mix(test::random_function({3, 3, 3, 3, 3}, 1)), ErrorCode::ModeOutOfRange);
}

TEST(DerivativeOperator, MatchesDiffOfPsi) {
    const GridFunction u = test::random_function({24, 18}, 12);
    const SingularSystem s = mode_svd(u, 0);
    for (std::size_t k = 0; k < 6; ++k) {
        const Eigen::VectorXd g = singular_derivative_operator(u, s, 0, k);
        const Eigen::VectorXd dpsi = u.axis(0).diff_matrix() * s.left.col(static_cast<Eigen::Index>(k));
        EXPECT_LE(weighted_norm(g - dpsi, s.row_weights) / std::max(weighted_norm(dpsi, s.row_weights), 1.0), 1e-11);
    }
}

TEST(DerivativeOperator, SineProductNorm) {
    const GridFunction u = on_unit_grid({257, 257}, sep1);
    const SingularSystem s = mode_svd(u, 0);
    EXPECT_NEAR(weighted_norm(singular_derivative_operator(u, s, 0, 0), s.row_weights), pi, 1e-2);
}

TEST(DerivativeOperator, BrownianNorms) {
    const GridFunction u = on_unit_grid({513, 513}, [](std::span<const double> x) { return std::min(x[0], x[1]); });
    const SingularSystem s = mode_svd(u, 0);
    for (std::size_t k = 1; k <= 10; ++k) {
        const double g = weighted_norm(singular_derivative_operator(u, s, 0, k - 1), s.row_weights);
        EXPECT_NEAR(g / ((k - 0.5) * pi), 1.0, 1e-2) << "k = " << k;
    }
}

TEST(DerivativeOperator, ZeroSigmaIsDegenerate) {
    const GridFunction u = on_unit_grid({9, 9}, sep1);
    const SingularSystem s = mode_svd(u, 0);
    EXPECT_ERROR_CODE(singular_derivative_operator(u, s, 0, 5), ErrorCode::DegenerateMode);
}

TEST(DerivativeData, SineProductBoundIsTight) {
    const GridFunction u = on_unit_grid({257, 257}, sep1);
    const DerivativeData d = derivative_data(u, mode_svd(u, 0), 0);
    ASSERT_EQ(d.retained, 1u);
    EXPECT_NEAR(d.bound_values[0], pi, 1e-2);
    EXPECT_NEAR(d.dpsi_norms[0], pi, 1e-2);
    EXPECT_LE(d.dpsi_norms[0], d.bound_values[0] + 1e-10);
    EXPECT_LE(d.max_transfer_error(), 1e-10);
}

TEST(DerivativeData, ConstantDirection) {
    const GridFunction u = on_unit_grid({17, 33}, [](std::span<const double> x) { return std::sin(pi * x[1]); });
    const DerivativeData d = derivative_data(u, mode_svd(u, 0), 0);
    ASSERT_EQ(d.retained, 1u);
    EXPECT_LE(d.dpsi_norms[0], 1e-12);
    EXPECT_LE(d.dpsi_norms[0], d.bound_values[0] + 1e-10);
}

TEST(DerivativeData, SineSumDerivativeNorms) {
    const GridFunction u = on_unit_grid({257, 257}, sinsum3);
    const DerivativeData d = derivative_data(u, mode_svd(u, 0), 0);
    ASSERT_GE(d.retained, 3u);
    for (int k = 1; k <= 3; ++k) EXPECT_NEAR(d.dpsi_norms[k - 1], k * pi, 1e-2);
    EXPECT_LE(d.max_bound_excess(), 1e-10);
}

TEST(DerivativeData, NormsOnlySkipsOperatorImages) {
    const GridFunction u = test::random_function({12, 10}, 3);
    const SingularSystem s = mode_svd(u, 1);
    const DerivativeData full = derivative_data(u, s, 1);
    const DerivativeData light = derivative_data(u, s, 1, DerivativeDetail::NormsOnly);
    EXPECT_TRUE(full.has_operator_data());
    EXPECT_FALSE(light.has_operator_data());
    EXPECT_EQ(full.dpsi_norms, light.dpsi_norms);
    EXPECT_EQ(full.bound_values, light.bound_values);
}

TEST(DerivativeData, RejectsForeignSystem) {
    const GridFunction u = test::random_function({6, 5}, 3);
    EXPECT_ERROR_CODE(derivative_data(u, mode_svd(u, 1), 0), ErrorCode::ShapeMismatch);
}

TEST(DerivativeData, ThreeWayModes) {
    const GridFunction u = test::random_function({7, 6, 5}, 31);
    for (std::size_t j = 0; j < 3; ++j) {
        const DerivativeData d = derivative_data(u, mode_svd(u, j), j);
        EXPECT_LE(d.max_transfer_error(), 1e-10) << "mode " << j;
        EXPECT_LE(d.max_bound_excess(), 1e-10) << "mode " << j;
    }
}

TEST(RetainedCount, Threshold) {
    Eigen::VectorXd s(4);
    s << 1.0, 1e-6, 1.1e-7, 0.9e-7;  // lambda ratio 1e-12, 1.21e-14, 0.81e-14
    SingularSystem sys;
    sys.sigmas = s;
    EXPECT_EQ(retained_count(sys), 3u);
}
