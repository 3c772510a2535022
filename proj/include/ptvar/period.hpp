#pragma once

#include "ptvar/error.hpp"
#include "ptvar/estimator.hpp"
#include "ptvar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ptvar {

enum class CvStyle {
    leave_one_out,  ///< term j is excluded from its own kernel sums
    paper,          ///< full-sample fits, term j included
};

[[nodiscard]] inline CvStyle cv_style_by_name(std::string_view name) {
    if (name == "loo") return CvStyle::leave_one_out;
    if (name == "paper") return CvStyle::paper;
    detail::fail("unknown CV style '" + std::string(name) + "' (expected loo|paper)");
}

struct PeriodScan {
    int t_max = 1;
    std::vector<double> cv;                 ///< cv[tau - 1]
    std::vector<std::size_t> fallbacks;     ///< zero-prediction terms per tau
    int t_hat = 1;
};

/// Bandwidth used inside CV for candidate tau: (N / tau)^{-1/3}.
[[nodiscard]] inline double cv_bandwidth(std::size_t length, int tau) {
    return std::pow(static_cast<double>(length) / tau, -1.0 / 3.0);
}

struct CvScore {
    double cv = 0.0;
    std::size_t fallbacks = 0;
};

/**
 * @brief CV(tau) = sum_{j=2}^{N} (X_j - a_hat^{(tau)}_j(j/N) X_{j-1})^2 at bandwidth b.
 *
 * a_hat^{(tau)}_j is the kernel estimate of season ((j - 1) mod tau) + 1 from
 * the terms j' = j (mod tau), at rescaled times j'/N. Terms whose denominator
 * degenerates predict zero and are counted in `fallbacks`.
 */
[[nodiscard]] inline CvScore cv_score(std::span<const double> series, int tau, double bandwidth, const Kernel& kernel,
                                      CvStyle style = CvStyle::leave_one_out) {
    detail::require(tau >= 1, "candidate period must be positive");
    detail::require(bandwidth > 0.0, "bandwidth must be positive");
    const std::size_t length = series.size();
    detail::require(length >= 2 * static_cast<std::size_t>(tau), "series too short for the candidate period");
    const double total = static_cast<double>(length);
    auto x = [&](std::ptrdiff_t t) { return t == 0 ? 0.0 : series[static_cast<std::size_t>(t - 1)]; };

    double mean_square = 0.0;
    for (double v : series) {
        mean_square += v * v;
    }
    const double min_denominator = degeneracy_ratio * mean_square / total;

    const double n_tau = std::floor(total / tau);
    const double radius = effective_window(kernel, n_tau, bandwidth);
    // offsets m with |m tau / N| <= radius
    const auto reach = static_cast<std::ptrdiff_t>(std::min(std::floor(radius * total / tau), total));
    std::vector<double> weights(static_cast<std::size_t>(2 * reach + 1));
    for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
        weights[static_cast<std::size_t>(m + reach)] = kernel(static_cast<double>(m) * tau / (total * bandwidth));
    }

    CvScore out;
    const auto step = static_cast<std::ptrdiff_t>(tau);
    const auto last = static_cast<std::ptrdiff_t>(length);
    for (std::ptrdiff_t j = 2; j <= last; ++j) {
        double num = 0.0;
        double den = 0.0;
        // jj = j + m tau must stay in [1, N]
        const std::ptrdiff_t m_lo = std::max(-reach, -((j - 1) / step));
        const std::ptrdiff_t m_hi = std::min(reach, (last - j) / step);
        for (std::ptrdiff_t m = m_lo; m <= m_hi; ++m) {
            if (m == 0 && style == CvStyle::leave_one_out) {
                continue;
            }
            const std::ptrdiff_t jj = j + m * step;
            const double w = weights[static_cast<std::size_t>(m + reach)];
            const double prev = x(jj - 1);
            num += w * x(jj) * prev;
            den += w * prev * prev;
        }
        // common 1/(n b) factor cancels in the ratio but not in the floor
        den /= n_tau * bandwidth;
        num /= n_tau * bandwidth;
        double a_hat = 0.0;
        if (den > min_denominator) {
            a_hat = num / den;
        } else {
            ++out.fallbacks;
        }
        const double resid = x(j) - a_hat * x(j - 1);
        out.cv += resid * resid;
    }
    return out;
}

/// Scans tau = 1..t_max at the bandwidth (N / tau)^{-1/3}; T_hat is the smallest minimizer.
[[nodiscard]] inline PeriodScan cv_period(std::span<const double> series, int t_max, const Kernel& kernel,
                                          CvStyle style = CvStyle::leave_one_out) {
    detail::require(t_max >= 1, "T_max must be at least 1");
    const std::size_t length = series.size();
    detail::require(length >= 10 * static_cast<std::size_t>(t_max), "series must hold at least 10 * T_max values");

    PeriodScan scan;
    scan.t_max = t_max;
    for (int tau = 1; tau <= t_max; ++tau) {
        const auto score = cv_score(series, tau, cv_bandwidth(length, tau), kernel, style);
        scan.cv.push_back(score.cv);
        scan.fallbacks.push_back(score.fallbacks);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < scan.cv.size(); ++k) {
        if (scan.cv[k] < scan.cv[best]) {
            best = k;
        }
    }
    scan.t_hat = static_cast<int>(best) + 1;
    return scan;
}

/**
 * @brief Truth-free bandwidth for a known period: the lambda on `lambdas`
 * minimizing the leave-one-out CV(T) at b = n^{-lambda}, ties to the smallest.
 */
[[nodiscard]] inline double cv_select_lambda(std::span<const double> series, int period, std::span<const double> lambdas,
                                             const Kernel& kernel) {
    detail::require(!lambdas.empty(), "lambda grid is empty");
    const double n = std::floor(static_cast<double>(series.size()) / period);
    double best_lambda = lambdas[0];
    double best_cv = 0.0;
    for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const double cv = cv_score(series, period, std::pow(n, -lambdas[l]), kernel).cv;
        if (l == 0 || cv < best_cv) {
            best_cv = cv;
            best_lambda = lambdas[l];
        }
    }
    return best_lambda;
}

} // namespace ptvar
