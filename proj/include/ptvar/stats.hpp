#pragma once

#include "ptvar/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>

namespace ptvar {

[[nodiscard]] inline double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

[[nodiscard]] inline double normal_quantile(double p) {
    detail::require(p > 0.0 && p < 1.0, "normal quantile needs p in (0,1)");
    return boost::math::quantile(boost::math::normal_distribution<double>(), p);
}

/// Two-sided p-value of a standard normal statistic.
[[nodiscard]] inline double two_sided_p_value(double z) {
    return std::erfc(std::abs(z) / std::numbers::sqrt2);
}

struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;   ///< unbiased (count - 1)

    [[nodiscard]] double standard_error() const {
        return count > 0 ? std::sqrt(variance / static_cast<double>(count)) : 0.0;
    }
};

[[nodiscard]] inline SampleSummary summarize(std::span<const double> xs) {
    SampleSummary out;
    out.count = xs.size();
    if (xs.empty()) {
        return out;
    }
    double acc = 0.0;
    for (double x : xs) {
        acc += x;
    }
    out.mean = acc / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) {
            ss += (x - out.mean) * (x - out.mean);
        }
        out.variance = ss / static_cast<double>(xs.size() - 1);
    }
    return out;
}

/// Jarque-Bera normality test.
struct JarqueBeraResult {
    double statistic = 0.0;   ///< (m/6) (S^2 + (K - 3)^2 / 4)
    double p_value = 1.0;     ///< chi-square(2) upper tail
    double skewness = 0.0;
    double kurtosis = 0.0;    ///< raw, 3 for a normal law
    std::size_t sample_size = 0;
};

/**
 * Skewness and kurtosis use central moments with 1/m normalization. The
 * chi-square(2) tail has the closed form exp(-x/2).
 */
[[nodiscard]] inline JarqueBeraResult jarque_bera(std::span<const double> values) {
    detail::require(values.size() >= 8, "Jarque-Bera needs at least 8 values");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    if (*lo == *hi) {
        throw Error(ErrorCategory::numerical, "zero variance");
    }
    const auto m = static_cast<double>(values.size());
    double mean = 0.0;
    for (double x : values) {
        mean += x;
    }
    mean /= m;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;
    for (double x : values) {
        const double d = x - mean;
        const double d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    m2 /= m;
    m3 /= m;
    m4 /= m;
    if (!(m2 > 0.0)) {
        throw Error(ErrorCategory::numerical, "zero variance");
    }
    JarqueBeraResult r;
    r.sample_size = values.size();
    r.skewness = m3 / std::pow(m2, 1.5);
    r.kurtosis = m4 / (m2 * m2);
    const double excess = r.kurtosis - 3.0;
    r.statistic = m / 6.0 * (r.skewness * r.skewness + 0.25 * excess * excess);
    r.p_value = std::exp(-0.5 * r.statistic);
    return r;
}

} // namespace ptvar
