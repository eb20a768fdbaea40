#include <cmath>

#include <gtest/gtest.h>

#include "sobosvd/discretization.hpp"
#include "support.hpp"

using namespace sobosvd;
using sobosvd::test::on_unit_grid;
using sobosvd::test::pi;

TEST(MakeAxis, ThreePointTrapezoidWeights) {
    const AxisPtr a = make_axis(3, 0.0, 1.0);
    ASSERT_EQ(a->size(), 3u);
    EXPECT_DOUBLE_EQ(a->weights()[0], 0.25);
    EXPECT_DOUBLE_EQ(a->weights()[1], 0.5);
    EXPECT_DOUBLE_EQ(a->weights()[2], 0.25);
}

TEST(MakeAxis, WeightsSumToLength) {
    EXPECT_NEAR(make_axis(5, 0.0, 1.0)->weights().sum(), 1.0, 1e-14);
    EXPECT_NEAR(make_axis(1001, -2.0, 3.5)->weights().sum(), 5.5, 5.5e-14);
}

TEST(MakeAxis, NodesSpanTheInterval) {
    const AxisPtr a = make_axis(11, -1.0, 2.0);
    EXPECT_EQ(a->nodes()[0], -1.0);
    EXPECT_EQ(a->nodes()[10], 2.0);
    for (Eigen::Index i = 1; i < 11; ++i) EXPECT_GT(a->nodes()[i], a->nodes()[i - 1]);
    EXPECT_NEAR(a->spacing(), 0.3, 1e-15);
}

TEST(MakeAxis, DiffMatrixExactOnQuadratics) {
    const AxisPtr a = make_axis(101, 0.0, 1.0);
    const Eigen::VectorXd x = a->nodes();
    const Eigen::VectorXd d = a->diff_matrix() * x.cwiseProduct(x);
    double worst = 0.0;
    for (Eigen::Index i = 1; i + 1 < x.size(); ++i) worst = std::max(worst, std::abs(d[i] - 2.0 * x[i]));
    EXPECT_LE(worst, 1e-12);
    // One-sided three-point stencils are exact on quadratics too.
    EXPECT_NEAR(d[0], 0.0, 1e-11);
    EXPECT_NEAR(d[100], 2.0, 1e-11);
}

TEST(MakeAxis, RejectsBadInput) {
    EXPECT_ERROR_CODE(make_axis(2, 0.0, 1.0), ErrorCode::InvalidAxis);
    EXPECT_ERROR_CODE(make_axis(5, 1.0, 1.0), ErrorCode::InvalidAxis);
    EXPECT_ERROR_CODE(make_axis(5, 2.0, 1.0), ErrorCode::InvalidAxis);
}

TEST(Sample, CornerGridProduct) {
    const GridFunction f = on_unit_grid({3, 3}, [](std::span<const double> x) { return x[0] * x[1]; });
    // Corners of the 3x3 grid carry the 2x2 corner pattern [[0,0],[0,1]].
    const std::size_t c00[] = {0, 0}, c20[] = {2, 0}, c02[] = {0, 2}, c22[] = {2, 2};
    EXPECT_EQ(f.values().at(c00), 0.0);
    EXPECT_EQ(f.values().at(c20), 0.0);
    EXPECT_EQ(f.values().at(c02), 0.0);
    EXPECT_EQ(f.values().at(c22), 1.0);
}

TEST(Sample, ConstantGivesOnes) {
    const GridFunction f = on_unit_grid({4, 5, 3}, [](std::span<const double>) { return 1.0; });
    for (double v : f.values().data()) EXPECT_EQ(v, 1.0);
}

TEST(Sample, CenterOfSineProduct) {
    const GridFunction f =
        on_unit_grid({65, 65}, [](std::span<const double> x) { return std::sin(pi * x[0]) * std::sin(pi * x[1]); });
    const std::size_t mid[] = {32, 32};
    EXPECT_NEAR(f.values().at(mid), 1.0, 1e-15);
}

TEST(Sample, NonFiniteNamesIndex) {
    try {
        on_unit_grid({5, 5}, [](std::span<const double> x) { return x[0] == 0.5 ? NAN : 1.0; });
        FAIL() << "expected a sampling error";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Sampling);
        EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
    }
}

TEST(InnerL2, MeasureOfSquare) {
    const GridFunction one = on_unit_grid({9, 9}, [](std::span<const double>) { return 1.0; });
    EXPECT_NEAR(inner_l2(one, one), 1.0, 1e-14);
}

TEST(InnerL2, SineSquareIntegral) {
    const GridFunction s = on_unit_grid({513}, [](std::span<const double> x) { return std::sin(pi * x[0]); });
    EXPECT_NEAR(inner_l2(s, s), 0.5, 1e-5);
}

TEST(InnerL2, SineOrthogonality) {
    const GridFunction s1 = on_unit_grid({513}, [](std::span<const double> x) { return std::sin(pi * x[0]); });
    const GridFunction s2 = on_unit_grid({513}, [](std::span<const double> x) { return std::sin(2 * pi * x[0]); });
    EXPECT_NEAR(inner_l2(s1, s2), 0.0, 1e-5);
}

TEST(InnerL2, ExactOnLinearProducts) {
    // Trapezoid integrates linears exactly: int_0^1 int_0^2 (1 + x)(y) = 1.5 * 2.
    const std::vector<AxisPtr> axes{make_axis(7, 0.0, 1.0), make_axis(9, 0.0, 2.0)};
    const GridFunction f = sample([](std::span<const double> x) { return 1.0 + x[0]; }, axes);
    const GridFunction g = sample([](std::span<const double> x) { return x[1]; }, axes);
    EXPECT_NEAR(inner_l2(f, g), 3.0, 1e-12);
}

TEST(InnerL2, RejectsDifferentAxes) {
    const GridFunction a = on_unit_grid({5, 5}, [](std::span<const double>) { return 1.0; });
    const GridFunction b = on_unit_grid({5, 6}, [](std::span<const double>) { return 1.0; });
    EXPECT_ERROR_CODE(inner_l2(a, b), ErrorCode::AxisMismatch);
}

TEST(InnerL2, PositiveDefinite) {
    const GridFunction z = on_unit_grid({5, 4}, [](std::span<const double>) { return 0.0; });
    EXPECT_EQ(inner_l2(z, z), 0.0);
    const GridFunction f = test::random_function({5, 4}, 3);
    EXPECT_GT(inner_l2(f, f), 0.0);
}

TEST(PartialDerivative, OfX) {
    const GridFunction f = on_unit_grid({17, 9}, [](std::span<const double> x) { return x[0]; });
    const GridFunction d0 = partial_derivative(f, 0);
    const GridFunction d1 = partial_derivative(f, 1);
    for (double v : d0.values().data()) EXPECT_NEAR(v, 1.0, 1e-12);
    for (double v : d1.values().data()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(PartialDerivative, OfSine) {
    const GridFunction f = on_unit_grid({201}, [](std::span<const double> x) { return std::sin(pi * x[0]); });
    const GridFunction d = partial_derivative(f, 0);
    const Eigen::VectorXd& x = f.axis(0).nodes();
    double worst = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        worst = std::max(worst, std::abs(d.values()[static_cast<std::size_t>(i)] - pi * std::cos(pi * x[i])));
    }
    EXPECT_LE(worst, 1e-3);
}

TEST(PartialDerivative, ModeOutOfRange) {
    const GridFunction f = on_unit_grid({5, 5}, [](std::span<const double>) { return 1.0; });
    EXPECT_ERROR_CODE(partial_derivative(f, 2), ErrorCode::ModeOutOfRange);
}

TEST(GridFunction, ShapeMustMatchAxes) {
    EXPECT_ERROR_CODE(GridFunction(unit_axes(std::vector<std::size_t>{4, 4}), DenseTensor({4, 5})),
                      ErrorCode::ShapeMismatch);
}

TEST(GridFunction, RejectsNonFinite) {
    DenseTensor t({3, 3});
    t[4] = INFINITY;
    EXPECT_ERROR_CODE(GridFunction(unit_axes(std::vector<std::size_t>{3, 3}), t), ErrorCode::NonFinite);
}

TEST(KronWeights, FirstModeFastest) {
    const std::vector<AxisPtr> axes{make_axis(3, 0.0, 1.0), make_axis(5, 0.0, 1.0)};
    const std::size_t modes[] = {0, 1};
    const Eigen::VectorXd w = kron_weights(axes, modes);
    ASSERT_EQ(w.size(), 15);
    EXPECT_DOUBLE_EQ(w[1], axes[0]->weights()[1] * axes[1]->weights()[0]);
    EXPECT_DOUBLE_EQ(w[3], axes[0]->weights()[0] * axes[1]->weights()[1]);
    EXPECT_NEAR(w.sum(), 1.0, 1e-14);
}
