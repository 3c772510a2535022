#include "ptvar/fbm.hpp"
#include "ptvar/period.hpp"
#include "ptvar/stats.hpp"
#include "ptvar/test_functions.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace ptvar;

TEST(PeriodCv, SingleCandidate) {
    const auto traj = simulate(CoefficientFamily::constant({0.5}), NoiseModel::gaussian(1.0), 300, 1);
    const auto scan = cv_period(traj.values, 1, epanechnikov());
    EXPECT_EQ(scan.t_hat, 1);
    ASSERT_EQ(scan.cv.size(), 1u);
    EXPECT_GT(scan.cv[0], 0.0);
}

TEST(PeriodCv, RejectsShortSeries) {
    const std::vector<double> xs(30, 1.0);
    EXPECT_THROW((void)cv_period(xs, 6, epanechnikov()), Error);
    EXPECT_THROW((void)cv_period(xs, 0, epanechnikov()), Error);
    EXPECT_THROW((void)cv_style_by_name("kfold"), Error);
}

TEST(PeriodCv, WhiteNoiseMostlyPicksOne) {
    int ones = 0;
    for (int r = 0; r < 20; ++r) {
        const auto traj = simulate(CoefficientFamily::constant({0.0}), NoiseModel::gaussian(1.0), 1000, derive_seed(31, r));
        ones += cv_period(traj.values, 4, epanechnikov()).t_hat == 1 ? 1 : 0;
    }
    EXPECT_GE(ones, 12);
}

TEST(PeriodCv, RecoversPeriodTwo) {
    const auto coeffs = make_test_function(PathKind::cosine_c2, 2, 0);
    int hits = 0;
    for (int r = 0; r < 10; ++r) {
        const auto traj = simulate(coeffs, NoiseModel::gaussian(4.0), 1000, derive_seed(77, r));
        const auto scan = cv_period(traj.values, 3, epanechnikov());
        hits += scan.t_hat == 2 ? 1 : 0;
        EXPECT_LT(scan.cv[1], scan.cv[0]);
    }
    EXPECT_GE(hits, 9);
}

TEST(PeriodCv, StylesAgreeOnClearSignal) {
    const auto coeffs = make_test_function(PathKind::cosine_c2, 2, 0);
    const auto traj = simulate(coeffs, NoiseModel::gaussian(4.0), 1000, 5);
    const auto loo = cv_period(traj.values, 4, gaussian(), CvStyle::leave_one_out);
    const auto full = cv_period(traj.values, 4, gaussian(), CvStyle::paper);
    EXPECT_EQ(loo.t_hat, 2);
    EXPECT_EQ(full.t_hat, 2);
    for (std::size_t k = 0; k < 4; ++k) {
        // in-sample residuals are never larger in total than held-out ones here
        EXPECT_LE(full.cv[k], loo.cv[k] * 1.0001);
    }
}

TEST(PeriodCv, BandwidthRule) {
    EXPECT_NEAR(cv_bandwidth(2000, 2), std::pow(1000.0, -1.0 / 3.0), 1e-15);
    EXPECT_NEAR(cv_bandwidth(1000, 1), 0.1, 1e-12);
}

TEST(Fbm, StartsAtZeroAndValidates) {
    const auto p = fbm_path(0.8, 1024, 1);
    ASSERT_EQ(p.values.size(), 1025u);
    EXPECT_EQ(p.values[0], 0.0);
    EXPECT_THROW((void)fbm_path(0.0, 1024, 1), Error);
    EXPECT_THROW((void)fbm_path(1.0, 1024, 1), Error);
    EXPECT_THROW((void)fbm_path(0.5, 1000, 1), Error);
}

TEST(Fbm, AutocovarianceFormula) {
    EXPECT_DOUBLE_EQ(fgn_autocovariance(0.5, 0.0), 1.0);
    EXPECT_NEAR(fgn_autocovariance(0.5, 3.0), 0.0, 1e-15);
    EXPECT_NEAR(fgn_autocovariance(0.8, 1.0), std::pow(2.0, 1.6) / 2.0 - 1.0, 1e-15);
}

TEST(Fbm, IncrementStatistics) {
    const std::size_t grid = 1024;
    for (double h : {0.3, 0.5, 0.8}) {
        double lag0 = 0.0;
        double lag1 = 0.0;
        std::size_t count = 0;
        for (int r = 0; r < 200; ++r) {
            const auto p = fbm_path(h, grid, derive_seed(11, r)).values;
            for (std::size_t k = 1; k + 1 < p.size(); ++k) {
                const double d0 = p[k] - p[k - 1];
                const double d1 = p[k + 1] - p[k];
                lag0 += d0 * d0;
                lag1 += d0 * d1;
                ++count;
            }
        }
        const double delta = 1.0 / static_cast<double>(grid);
        EXPECT_NEAR(lag0 / count / std::pow(delta, 2.0 * h), 1.0, 0.02) << "H=" << h;
        const double expected_rho = std::pow(2.0, 2.0 * h - 1.0) - 1.0;
        EXPECT_NEAR(lag1 / lag0, expected_rho, 0.02) << "H=" << h;
    }
}

TEST(Fbm, CovarianceIdentity) {
    const std::size_t grid = 64;
    const double h = 0.8;
    const std::vector<std::size_t> points{16, 32, 48, 64};
    std::vector<double> acc(points.size() * points.size(), 0.0);
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
        const auto p = fbm_path(h, grid, derive_seed(12, r)).values;
        for (std::size_t i = 0; i < points.size(); ++i) {
            for (std::size_t j = 0; j < points.size(); ++j) {
                acc[i * points.size() + j] += p[points[i]] * p[points[j]];
            }
        }
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = 0; j < points.size(); ++j) {
            const double s = static_cast<double>(points[i]) / grid;
            const double t = static_cast<double>(points[j]) / grid;
            const double expected =
                0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(t - s), 2 * h));
            // Var(B_s B_t) <= 2 for s,t <= 1, so 4 sqrt(2/reps) bounds the error
            EXPECT_NEAR(acc[i * points.size() + j] / reps, expected, 4.0 * std::sqrt(2.0 / reps));
        }
    }
}

TEST(TestFunctions, PathKindsAreNormalized) {
    for (auto kind : {PathKind::wiener, PathKind::wiener_integral, PathKind::fbm}) {
        const auto fam = make_test_function(kind, 1, default_path_seed);
        double sup = 0.0;
        for (double v : fam.function(1).grid()) {
            sup = std::max(sup, std::abs(v));
        }
        EXPECT_NEAR(sup, 0.9, 1e-12);
        EXPECT_FALSE(fam.function(1).differentiable());
        EXPECT_EQ(fam.function(1).grid().size(), test_path_grid + 1);
    }
    const auto cos_family = make_test_function(PathKind::cosine_c2, 2, 0);
    EXPECT_NEAR(cos_family(1, 0.0), -0.9, 1e-15);
    EXPECT_NEAR(cos_family(2, 0.0), 0.9, 1e-15);
    EXPECT_NEAR(cos_family(2, 0.5), 0.9 * std::cos(1.5), 1e-15);
    EXPECT_NEAR(cos_family.regularity(), 2.0, 0.0);
}

TEST(TestFunctions, SeededPathsAreReproducible) {
    const auto a = make_test_function(PathKind::fbm, 2, 42);
    const auto b = make_test_function(PathKind::fbm, 2, 42);
    const auto c = make_test_function(PathKind::fbm, 2, 43);
    EXPECT_EQ(a(1, 0.37), b(1, 0.37));
    EXPECT_NE(a(1, 0.37), c(1, 0.37));
}

TEST(TestFunctions, Names) {
    EXPECT_EQ(path_kind_by_name("cosine"), PathKind::cosine_c2);
    EXPECT_EQ(path_kind_by_name("wiener-integral"), PathKind::wiener_integral);
    EXPECT_EQ(function_id(PathKind::cosine_c2), "a2");
    EXPECT_EQ(function_id(PathKind::wiener), "a0.5");
    EXPECT_EQ(function_id(PathKind::wiener_integral), "a1.5");
    EXPECT_THROW((void)path_kind_by_name("brownian"), Error);
}
