#pragma once

#include "ptvar/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <string_view>

namespace ptvar {

enum class SupportType { compact, exponential_tail };

/**
 * @brief A symmetric smoothing kernel with the metadata the estimator needs.
 *
 * `support_scale` is the half-width B for compact kernels and the tail rate
 * beta for exponential-tail kernels.
 */
struct Kernel {
    std::string name;
    double (*evaluate)(double) = nullptr;
    SupportType support = SupportType::compact;
    double support_scale = 1.0;
    double moment_order = 2.0;
    double l2_norm_sq = 0.0;      ///< int K^2
    double second_moment = 0.0;   ///< int z^2 K(z) dz

    [[nodiscard]] double operator()(double x) const { return evaluate(x); }
};

namespace detail {

inline double epanechnikov_eval(double x) {
    return std::abs(x) <= 1.0 ? 0.75 * (1.0 - x * x) : 0.0;
}

inline double gaussian_eval(double x) {
    return std::numbers::inv_sqrtpi / std::numbers::sqrt2 * std::exp(-0.5 * x * x);
}

} // namespace detail

[[nodiscard]] inline Kernel epanechnikov() {
    return Kernel{"epanechnikov", &detail::epanechnikov_eval, SupportType::compact, 1.0, 2.0, 0.6, 0.2};
}

/// Satisfies the exponential-tail condition for every rate below 1/2; 0.25 is recorded.
[[nodiscard]] inline Kernel gaussian() {
    return Kernel{"gaussian", &detail::gaussian_eval, SupportType::exponential_tail, 0.25, 2.0,
                  0.5 * std::numbers::inv_sqrtpi, 1.0};
}

[[nodiscard]] inline Kernel kernel_by_name(std::string_view name) {
    if (name == "epanechnikov") {
        return epanechnikov();
    }
    if (name == "gaussian") {
        return gaussian();
    }
    detail::fail("unknown kernel '" + std::string(name) + "' (expected epanechnikov|gaussian)");
}

/// Radius in rescaled time beyond which kernel weights are dropped:
/// B b_n for compact kernels, log(n) b_n for exponential tails.
[[nodiscard]] inline double effective_window(const Kernel& kernel, double n, double bandwidth) {
    detail::require(bandwidth > 0.0, "bandwidth must be positive");
    if (kernel.support == SupportType::compact) {
        return kernel.support_scale * bandwidth;
    }
    return std::log(std::max(n, 1.0)) * bandwidth;
}

} // namespace ptvar
