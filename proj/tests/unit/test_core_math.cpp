// Copyright (C) 2026 The sharpv Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "oracle/reference.hpp"
#include "sharpv/core_math.hpp"
#include "sharpv/error.hpp"

namespace sharpv {
namespace {

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t d, double scale = 1.0) {
    std::normal_distribution<double> normal(0.0, scale);
    std::vector<double> v(d);
    for (double& x : v) {
        x = normal(rng);
    }
    return v;
}

Mat random_mat(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    return Mat(rows, cols, random_vector(rng, rows * cols));
}

TEST(CoreMathTest, VecRejectsNonFinite) {
    EXPECT_THROW(Vec({1.0, std::numeric_limits<double>::quiet_NaN()}), ValueError);
    EXPECT_THROW(Vec({std::numeric_limits<double>::infinity()}), ValueError);
    EXPECT_THROW(Mat(1, 2, {0.0, std::numeric_limits<double>::infinity()}), ValueError);
}

TEST(CoreMathTest, MatRejectsWrongValueCount) {
    EXPECT_THROW(Mat(2, 2, {1.0, 2.0, 3.0}), ShapeError);
}

TEST(CoreMathTest, NormalizeThreeFourFive) {
    const Vec u = l2_normalize(std::vector<double>{3.0, 4.0});
    EXPECT_DOUBLE_EQ(u[0], 0.6);
    EXPECT_DOUBLE_EQ(u[1], 0.8);
}

TEST(CoreMathTest, NormalizeZeroIsZero) {
    EXPECT_EQ(l2_normalize(std::vector<double>{0.0, 0.0}), Vec::zeros(2));
    EXPECT_EQ(l2_normalize(std::vector<double>{1e-13, 0.0}), Vec::zeros(2));
}

TEST(CoreMathTest, NormalizeRandomHasUnitNorm) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Vec u = l2_normalize(random_vector(rng, 32, 5.0));
        EXPECT_NEAR(oracle::kahan_norm(u.values()), 1.0, 1e-9);
    }
}

TEST(CoreMathTest, DissimExamples) {
    const std::vector<double> e1{1.0, 0.0};
    const std::vector<double> e2{0.0, 1.0};
    const std::vector<double> neg{-1.0, 0.0};
    EXPECT_DOUBLE_EQ(dissim(e1, e1), 0.0);
    EXPECT_NEAR(dissim(e1, e2), std::sqrt(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(dissim(e1, neg), 2.0);
}

TEST(CoreMathTest, ZeroVectorConventions) {
    const std::vector<double> zero{0.0, 0.0, 0.0};
    const std::vector<double> v{1.0, -2.0, 0.5};
    EXPECT_DOUBLE_EQ(dissim(zero, v), 1.0);
    EXPECT_DOUBLE_EQ(dissim(zero, zero), 0.0);
    EXPECT_DOUBLE_EQ(cosine_sim(zero, v), 0.0);
}

TEST(CoreMathTest, CosineExamples) {
    const std::vector<double> v{0.3, -1.2, 2.0};
    const std::vector<double> v2{0.6, -2.4, 4.0};
    EXPECT_NEAR(cosine_sim(v, v2), 1.0, 1e-15);
    EXPECT_DOUBLE_EQ(cosine_sim(std::vector<double>{1.0, 0.0}, std::vector<double>{0.0, 1.0}), 0.0);
}

TEST(CoreMathTest, DimensionMismatchThrows) {
    const std::vector<double> a{1.0, 2.0};
    const std::vector<double> b{1.0, 2.0, 3.0};
    EXPECT_THROW(dissim(a, b), ShapeError);
    EXPECT_THROW(cosine_sim(a, b), ShapeError);
    EXPECT_THROW(row_dissim(Mat(2, 2), b), ShapeError);
    EXPECT_THROW(paired_row_dissim(Mat(2, 2), Mat(3, 2)), ShapeError);
    EXPECT_THROW(mean_rows(Mat(0, 3)), ShapeError);
}

TEST(CoreMathTest, DissimProperties) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> dim(1, 128);
    std::uniform_real_distribution<double> alpha(1e-3, 1e3);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t d = dim(rng);
        const auto a = random_vector(rng, d);
        const auto b = random_vector(rng, d);
        const double ab = dissim(a, b);
        EXPECT_GE(ab, 0.0);
        EXPECT_LE(ab, 2.0);
        EXPECT_NEAR(dissim(a, a), 0.0, 1e-9);
        EXPECT_DOUBLE_EQ(ab, dissim(b, a));
        EXPECT_NEAR(ab * ab, 2.0 - 2.0 * cosine_sim(a, b), 1e-9);

        auto scaled = a;
        const double s = alpha(rng);
        for (double& x : scaled) {
            x *= s;
        }
        EXPECT_NEAR(dissim(scaled, b), ab, 1e-9);
    }
}

TEST(CoreMathTest, RowDissimExamples) {
    const Mat m = Mat::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    const Vec r = row_dissim(m, std::vector<double>{1.0, 0.0});
    EXPECT_DOUBLE_EQ(r[0], 0.0);
    EXPECT_NEAR(r[1], std::sqrt(2.0), 1e-15);

    const Mat same = Mat::from_rows({{2.0, 1.0}, {2.0, 1.0}, {2.0, 1.0}});
    EXPECT_EQ(row_dissim(same, std::vector<double>{2.0, 1.0}), Vec::zeros(3));
}

TEST(CoreMathTest, PairedRowDissimExamples) {
    const Mat a = Mat::from_rows({{1.0, 0.0}, {1.0, 0.0}});
    const Mat b = Mat::from_rows({{-1.0, 0.0}, {-1.0, 0.0}});
    EXPECT_EQ(paired_row_dissim(a, a), Vec::zeros(2));
    EXPECT_EQ(paired_row_dissim(a, b), Vec(std::vector<double>{2.0, 2.0}));
}

TEST(CoreMathTest, RowOpsMatchScalarLoopOracle) {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<std::size_t> extent(1, 64);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t rows = extent(rng);
        const std::size_t cols = extent(rng);
        const Mat a = random_mat(rng, rows, cols);
        const Mat b = random_mat(rng, rows, cols);
        const auto ref = random_vector(rng, cols);

        const Vec r = row_dissim(a, ref);
        const Vec p = paired_row_dissim(a, b);
        for (std::size_t i = 0; i < rows; ++i) {
            EXPECT_NEAR(r[i], oracle::dissim(a.row(i).data(), ref.data(), cols), 1e-9);
            EXPECT_NEAR(p[i], oracle::dissim(a.row(i).data(), b.row(i).data(), cols), 1e-9);
        }
    }
}

TEST(CoreMathTest, MeanRowsExamples) {
    const Mat one = Mat::from_rows({{1.5, -2.0, 3.0}});
    EXPECT_EQ(mean_rows(one), Vec(std::vector<double>{1.5, -2.0, 3.0}));
    const Mat two = Mat::from_rows({{1.0, 0.0}, {0.0, 1.0}});
    EXPECT_EQ(mean_rows(two), Vec(std::vector<double>{0.5, 0.5}));
}

TEST(CoreMathTest, MeanRowsMatchesTwoPassOracle) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Mat m = random_mat(rng, 16, 8);
        const auto expected = oracle::mean_rows(m.values(), 16, 8);
        const Vec got = mean_rows(m);
        for (std::size_t j = 0; j < 8; ++j) {
            EXPECT_NEAR(got[j], expected[j], 1e-12);
        }
    }
}

}  // namespace
}  // namespace sharpv
