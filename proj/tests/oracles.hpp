#pragma once

// Independent reference computations used only by the test suites.

#include "ptvar/process.hpp"

#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

namespace ptvar::oracle {

/// Composite Simpson rule on [lo, hi] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, std::size_t panels = 200000) {
    if (panels % 2 == 1) {
        ++panels;
    }
    const double h = (hi - lo) / static_cast<double>(panels);
    double acc = f(lo) + f(hi);
    for (std::size_t k = 1; k < panels; ++k) {
        acc += (k % 2 == 1 ? 4.0 : 2.0) * f(lo + h * static_cast<double>(k));
    }
    return acc * h / 3.0;
}

/// Periodic fixed points of v_t = a_t^2 v_{t-1} + sigma^2 and
/// w_t = a_t^4 w_{t-1} + 6 sigma^2 a_t^2 v_{t-1} + mu4 for frozen coefficients,
/// obtained by iterating the recursions from zero until they stop moving.
struct MomentFixedPoint {
    std::vector<double> variance;   ///< [s - 1]
    std::vector<double> fourth;     ///< [s - 1]
};

inline MomentFixedPoint iterate_moments(const std::vector<double>& a, double sigma2, double mu4) {
    const std::size_t period = a.size();
    double v = 0.0;
    double w = 0.0;
    MomentFixedPoint out{std::vector<double>(period), std::vector<double>(period)};
    // alpha <= 0.95 in the tests: 0.95^(4 * 20000) is far below rounding
    for (std::size_t t = 1; t <= 20000 * period; ++t) {
        const double c = a[(t - 1) % period];
        const double v_prev = v;
        v = c * c * v_prev + sigma2;
        w = c * c * c * c * w + 6.0 * sigma2 * c * c * v_prev + mu4;
        out.variance[(t - 1) % period] = v;
        out.fourth[(t - 1) % period] = w;
    }
    return out;
}

/// The closed form r_s (1 + sum_i delta_{s,i}) / (1 - delta_{s,T-1}) with the
/// forcing frozen at season s; exact only when all a_s^2 coincide.
inline double gamma4_season_frozen(const CoefficientFamily& coeffs, const NoiseModel& noise, long long s, double v) {
    const double sigma2 = noise.variance();
    const double r = *noise.fourth_moment() + 6.0 * sigma2 * theoretical_gamma2(coeffs, noise, s, v) -
                     6.0 * sigma2 * sigma2;
    double prod = 1.0;
    double sum = 1.0;
    for (int j = 0; j < coeffs.period(); ++j) {
        const double a = coeffs(s - j, v);
        prod *= a * a * a * a;
        if (j + 1 < coeffs.period()) {
            sum += prod;
        }
    }
    return r * sum / (1.0 - prod);
}

/// Exact E(X_t^2), t = 0..nT, of the simulated model (X_0 = 0).
inline std::vector<double> exact_variances(const CoefficientFamily& coeffs, const NoiseModel& noise, std::size_t n) {
    const auto period = static_cast<std::size_t>(coeffs.period());
    const std::size_t length = n * period;
    std::vector<double> v(length + 1, 0.0);
    for (std::size_t t = 1; t <= length; ++t) {
        const double a = coeffs(static_cast<long long>((t - 1) % period) + 1,
                                static_cast<double>(t) / static_cast<double>(length));
        v[t] = a * a * v[t - 1] + noise.variance();
    }
    return v;
}

/// E(N_hat) / E(D_hat) with every kernel term kept: the deterministic
/// centre of the estimator, from the exact variance recursion.
inline double expected_ratio(const CoefficientFamily& coeffs, const NoiseModel& noise, std::size_t n, int season,
                             double u, double bandwidth, const std::function<double(double)>& kernel) {
    const auto period = static_cast<std::size_t>(coeffs.period());
    const auto v = exact_variances(coeffs, noise, n);
    const double total = static_cast<double>(n * period);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t j = static_cast<std::size_t>(season) + k * period;
        const double w = kernel((static_cast<double>(j) / total - u) / bandwidth);
        num += w * coeffs(season, static_cast<double>(j) / total) * v[j - 1];
        den += w * v[j - 1];
    }
    return num / den;
}

/// Estimator with no window truncation: every j in I_{n,s} contributes.
inline double full_sum_estimate(const Trajectory& traj, int season, double u, double bandwidth,
                                const std::function<double(double)>& kernel) {
    const auto period = static_cast<std::size_t>(traj.period);
    const double total = static_cast<double>(traj.size());
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < traj.n; ++k) {
        const std::size_t j = static_cast<std::size_t>(season) + k * period;
        const double w = kernel((static_cast<double>(j) / total - u) / bandwidth);
        num += w * traj.x(j) * traj.x(j - 1);
        den += w * traj.x(j - 1) * traj.x(j - 1);
    }
    return num / den;
}

} // namespace ptvar::oracle
