#include <cmath>

#include <gtest/gtest.h>

#include "sobosvd/svd.hpp"
#include "support.hpp"

using namespace sobosvd;
using sobosvd::test::on_unit_grid;
using sobosvd::test::pi;

namespace {

double sine_product(std::span<const double> x) {
    double p = 1.0;
    for (double xi : x) p *= std::sin(pi * xi);
    return p;
}

double sinsum3(std::span<const double> x) {
    const double c[] = {1.0, 0.5, 0.25};
    double s = 0.0;
    for (int k = 1; k <= 3; ++k) s += c[k - 1] * std::sin(k * pi * x[0]) * std::sin(k * pi * x[1]);
    return s;
}

void expect_orthonormal(const Eigen::MatrixXd& v, const Eigen::VectorXd& w, Eigen::Index r, double tol) {
    const Eigen::MatrixXd g = v.leftCols(r).transpose() * w.asDiagonal() * v.leftCols(r);
    EXPECT_LE((g - Eigen::MatrixXd::Identity(r, r)).cwiseAbs().maxCoeff(), tol);
}

}  // namespace

TEST(WeightedSvd, SineProductRankOne) {
    const GridFunction u = on_unit_grid({257, 257}, sine_product);
    const SingularSystem s = mode_svd(u, 0);
    EXPECT_NEAR(s.sigma(0), 0.5, 1e-4);
    EXPECT_LE(s.sigma(1) / s.sigma(0), 1e-10);
}

TEST(WeightedSvd, ZeroMatrix) {
    const SingularSystem s = weighted_svd(Eigen::MatrixXd::Zero(4, 3), Eigen::VectorXd::Ones(4), Eigen::VectorXd::Ones(3));
    EXPECT_EQ(s.count(), 3u);
    for (std::size_t k = 0; k < s.count(); ++k) EXPECT_EQ(s.sigma(k), 0.0);
    EXPECT_EQ(numerical_rank(s), 0u);
}

TEST(WeightedSvd, BrownianSpectrum) {
    const GridFunction u = on_unit_grid({513, 513}, [](std::span<const double> x) { return std::min(x[0], x[1]); });
    const SingularSystem s = mode_svd(u, 0);
    for (std::size_t k = 1; k <= 10; ++k) {
        const double ref = 1.0 / std::pow((k - 0.5) * pi, 2);
        EXPECT_NEAR(s.sigma(k - 1) / ref, 1.0, 1e-3) << "k = " << k;
    }
}

TEST(WeightedSvd, Invariants) {
    const GridFunction u = test::random_function({9, 7}, 4);
    const SingularSystem s = mode_svd(u, 0);
    ASSERT_EQ(s.count(), 7u);
    for (std::size_t k = 1; k < s.count(); ++k) EXPECT_LE(s.sigma(k), s.sigma(k - 1));
    EXPECT_GE(s.sigmas.minCoeff(), 0.0);
    expect_orthonormal(s.left, s.row_weights, 7, 1e-12);
    expect_orthonormal(s.right, s.col_weights, 7, 1e-12);
    const Eigen::MatrixXd m = matricize_mode(u.values(), 0);
    const double rel = weighted_frobenius(s.reconstruct(s.count()) - m, s.row_weights, s.col_weights) /
                       weighted_frobenius(m, s.row_weights, s.col_weights);
    EXPECT_LE(rel, 1e-12);
}

TEST(WeightedSvd, SignConvention) {
    const GridFunction u = test::random_function({8, 6}, 8);
    const SingularSystem s = mode_svd(u, 0);
    for (Eigen::Index k = 0; k < s.sigmas.size(); ++k) {
        Eigen::Index arg = 0;
        s.left.col(k).cwiseAbs().maxCoeff(&arg);
        EXPECT_GT(s.left(arg, k), 0.0);
    }
    // Flipping the input flips phi, never psi.
    const SingularSystem t = mode_svd(-1.0 * u, 0);
    EXPECT_LE((t.left - s.left).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((t.right + s.right).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WeightedSvd, RejectsBadInput) {
    const Eigen::MatrixXd m = Eigen::MatrixXd::Ones(3, 2);
    EXPECT_ERROR_CODE(weighted_svd(m, Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(2)), ErrorCode::ShapeMismatch);
    Eigen::VectorXd bad = Eigen::VectorXd::Ones(3);
    bad[1] = 0.0;
    EXPECT_ERROR_CODE(weighted_svd(m, bad, Eigen::VectorXd::Ones(2)), ErrorCode::InvalidWeights);
    bad[1] = -1.0;
    EXPECT_ERROR_CODE(weighted_svd(m, bad, Eigen::VectorXd::Ones(2)), ErrorCode::InvalidWeights);
    Eigen::MatrixXd nan = m;
    nan(2, 1) = NAN;
    EXPECT_ERROR_CODE(weighted_svd(nan, Eigen::VectorXd::Ones(3), Eigen::VectorXd::Ones(2)), ErrorCode::NonFinite);
}

TEST(ModeSvd, RankOneThreeWay) {
    const GridFunction u = on_unit_grid({33, 33, 33}, sine_product);
    for (std::size_t j = 0; j < 3; ++j) {
        const SingularSystem s = mode_svd(u, j);
        EXPECT_NEAR(s.sigma(0), std::pow(0.5, 1.5), 1e-3);
        EXPECT_EQ(numerical_rank(s, 1e-8), 1u);
        EXPECT_EQ(s.row_modes, (std::vector<std::size_t>{j}));
    }
}

TEST(ModeSvd, IndependentOfMode) {
    const GridFunction u = on_unit_grid({9, 17}, [](std::span<const double> x) { return std::exp(x[1]); });
    const SingularSystem s = mode_svd(u, 0);
    EXPECT_EQ(numerical_rank(s), 1u);
    const Eigen::VectorXd psi = s.left.col(0);
    EXPECT_LE((psi.array() - psi[0]).abs().maxCoeff(), 1e-12);
    EXPECT_NEAR(psi[0], 1.0, 1e-12);
}

TEST(ModeSvd, SineSumSigmas) {
    const GridFunction u = on_unit_grid({257, 257}, sinsum3);
    const SingularSystem s = mode_svd(u, 0);
    EXPECT_NEAR(s.sigma(0), 0.5, 1e-4);
    EXPECT_NEAR(s.sigma(1), 0.25, 1e-4);
    EXPECT_NEAR(s.sigma(2), 0.125, 1e-4);
    EXPECT_EQ(numerical_rank(s, 1e-8), 3u);
}

TEST(ModeSvd, ModeOutOfRange) {
    EXPECT_ERROR_CODE(mode_svd(test::random_function({3, 3}, 1), 2), ErrorCode::ModeOutOfRange);
}

TEST(NumericalRank, Examples) {
    EXPECT_EQ(numerical_rank(mode_svd(on_unit_grid({65, 65}, sine_product), 0), 1e-8), 1u);
    EXPECT_EQ(numerical_rank(mode_svd(on_unit_grid({65, 65}, [](std::span<const double>) { return 0.0; }), 0)), 0u);
    EXPECT_EQ(numerical_rank(mode_svd(on_unit_grid({65, 65}, sinsum3), 0), 1e-8), 3u);
}

TEST(Hosvd, RankOneCore) {
    const HosvdSystem h = hosvd(on_unit_grid({33, 33, 33}, sine_product));
    EXPECT_EQ(h.ranks, (std::vector<std::size_t>{1, 1, 1}));
    ASSERT_EQ(h.core.size(), 1u);
    EXPECT_NEAR(std::abs(h.core[0]), std::pow(0.5, 1.5), 1e-3);
}

TEST(Hosvd, TwoWayCoreIsDiagonal) {
    const GridFunction u = on_unit_grid({65, 65}, sinsum3);
    const HosvdSystem h = hosvd(u);
    ASSERT_EQ(h.core.shape(), (Shape{3, 3}));
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            const std::size_t idx[] = {i, j};
            if (i == j) {
                EXPECT_NEAR(std::abs(h.core.at(idx)), h.modes[0].sigma(i), 1e-10);
            } else {
                EXPECT_NEAR(h.core.at(idx), 0.0, 1e-10);
            }
        }
    }
}

TEST(Hosvd, ZeroTensorHasEmptyRanks) {
    const HosvdSystem h = hosvd(on_unit_grid({5, 6, 7}, [](std::span<const double>) { return 0.0; }));
    EXPECT_EQ(h.ranks, (std::vector<std::size_t>{0, 0, 0}));
    EXPECT_EQ(h.core.size(), 0u);
}

TEST(Hosvd, ReconstructsAndCoreGramIsDiagonal) {
    const GridFunction u = test::random_function({5, 6, 4}, 17);
    const HosvdSystem h = hosvd(u);
    EXPECT_LE(test::max_abs_diff(h.reconstruct(), u.values()), 1e-12);
    for (std::size_t j = 0; j < 3; ++j) {
        const Eigen::MatrixXd c = matricize_mode(h.core, j);
        const Eigen::MatrixXd g = c * c.transpose();
        const Eigen::VectorXd s2 = h.modes[j].sigmas.head(static_cast<Eigen::Index>(h.ranks[j])).cwiseAbs2();
        EXPECT_LE((g - Eigen::MatrixXd(s2.asDiagonal())).cwiseAbs().maxCoeff(), 1e-10);
    }
}
