#pragma once

#include "ptvar/error.hpp"
#include "ptvar/kernels.hpp"
#include "ptvar/process.hpp"
#include "ptvar/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ptvar {

/// D_hat at or below this multiple of the sample second moment counts as degenerate.
inline constexpr double degeneracy_ratio = 1e-12;

/// Upper clamp for prod_j a_hat^2 in the studentization.
inline constexpr double product_clamp = 1.0 - 1e-6;

/**
 * @brief Kernel weights of one (season, u, bandwidth) cell, restricted to the
 * effective window.
 *
 * Term k uses time index j = season + (first + k) T. Weights already carry
 * the 1 / (n b_n) factor. Plans depend only on (n, T, s, u, b, kernel), so
 * they can be shared across trajectories of the same shape.
 */
struct WeightPlan {
    int season = 1;
    int period = 1;
    std::size_t first = 0;
    std::vector<double> weights;
};

[[nodiscard]] inline WeightPlan make_weight_plan(std::size_t n, int period, int season, double u, double bandwidth,
                                                 const Kernel& kernel) {
    detail::require(season >= 1 && season <= period, "season must lie in 1..T");
    detail::require(bandwidth > 0.0, "bandwidth must be positive");
    const double nd = static_cast<double>(n);
    const double total = nd * period;
    const double radius = effective_window(kernel, nd, bandwidth);
    const double offset = static_cast<double>(season) / period;

    // position of term k is (k + s/T) / n
    const double k_lo = std::ceil((u - radius) * nd - offset);
    const double k_hi = std::floor((u + radius) * nd - offset);
    WeightPlan plan;
    plan.season = season;
    plan.period = period;
    if (k_hi < 0.0 || k_lo > nd - 1.0 || k_lo > k_hi) {
        return plan;
    }
    const auto first = static_cast<std::size_t>(std::max(k_lo, 0.0));
    const auto last = static_cast<std::size_t>(std::min(k_hi, nd - 1.0));
    plan.first = first;
    plan.weights.reserve(last - first + 1);
    const double norm = 1.0 / (nd * bandwidth);
    for (std::size_t k = first; k <= last; ++k) {
        const double j = static_cast<double>(season) + static_cast<double>(k) * period;
        plan.weights.push_back(norm * kernel((j / total - u) / bandwidth));
    }
    return plan;
}

struct PointEstimate {
    double a_hat = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
};

[[nodiscard]] inline double degeneracy_floor(const Trajectory& traj) noexcept {
    return degeneracy_ratio * traj.mean_square();
}

/// N_hat / D_hat for one plan, nullopt when D_hat <= min_denominator.
[[nodiscard]] inline std::optional<PointEstimate> try_estimate(const Trajectory& traj, const WeightPlan& plan,
                                                               double min_denominator) {
    const auto stride = static_cast<std::size_t>(plan.period);
    std::size_t j = static_cast<std::size_t>(plan.season) + plan.first * stride;
    double num = 0.0;
    double den = 0.0;
    for (double w : plan.weights) {
        const double prev = traj.x(j - 1);
        num += w * traj.values[j - 1] * prev;
        den += w * prev * prev;
        j += stride;
    }
    if (!(den > min_denominator)) {
        return std::nullopt;
    }
    return PointEstimate{num / den, num, den};
}

inline void check_estimate_inputs(const Trajectory& traj, int season, double u, double bandwidth) {
    detail::require(season >= 1 && season <= traj.period, "season must lie in 1..T");
    detail::require(u > 0.0 && u < 1.0, "u must lie strictly inside (0,1)");
    detail::require(bandwidth > 0.0, "bandwidth must be positive");
    detail::require(traj.size() >= 2, "trajectory needs at least two observations");
}

/**
 * @brief Kernel estimate a_hat_s(u) = N_hat_s(u) / D_hat_s(u).
 *
 * Sums run over j in {s, s+T, ..., s+(n-1)T} at rescaled times j/(nT).
 * The j = s term pairs with X_{s-1}, which is X_0 = 0 when s = 1.
 *
 * @throws DegenerateDenominator when D_hat <= 1e-12 * mean(X^2).
 */
[[nodiscard]] inline PointEstimate estimate(const Trajectory& traj, int season, double u, double bandwidth,
                                            const Kernel& kernel) {
    check_estimate_inputs(traj, season, u, bandwidth);
    const auto plan = make_weight_plan(traj.n, traj.period, season, u, bandwidth, kernel);
    const auto est = try_estimate(traj, plan, degeneracy_floor(traj));
    if (!est) {
        throw DegenerateDenominator("degenerate denominator at season " + std::to_string(season) +
                                    ", u = " + std::to_string(u));
    }
    return *est;
}

/// The 99-point grid 0.01, 0.02, ..., 0.99.
[[nodiscard]] inline std::vector<double> default_grid() {
    std::vector<double> g(99);
    for (int i = 0; i < 99; ++i) {
        g[static_cast<std::size_t>(i)] = (i + 1) / 100.0;
    }
    return g;
}

struct GridCell {
    bool valid = false;
    double a_hat = std::numeric_limits<double>::quiet_NaN();
    double numerator = 0.0;
    double denominator = 0.0;
    double std_error = std::numeric_limits<double>::quiet_NaN();
    double ci_lo = std::numeric_limits<double>::quiet_NaN();
    double ci_hi = std::numeric_limits<double>::quiet_NaN();
    bool clamped = false;
};

/// a_hat_s(u_i) over all seasons and grid points; cells are season-major.
struct EstimateGrid {
    int period = 1;
    std::size_t n = 0;
    std::vector<double> grid;
    double bandwidth = 0.0;
    std::string kernel_name;
    double kernel_l2 = 0.0;
    std::vector<GridCell> cells;
    std::optional<double> ci_level;

    [[nodiscard]] GridCell& cell(int season, std::size_t i) {
        return cells[static_cast<std::size_t>(season - 1) * grid.size() + i];
    }
    [[nodiscard]] const GridCell& cell(int season, std::size_t i) const {
        return cells[static_cast<std::size_t>(season - 1) * grid.size() + i];
    }
    [[nodiscard]] std::size_t missing() const {
        return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const GridCell& c) { return !c.valid; }));
    }
};

/// Evaluates every (season, u) cell; degenerate cells stay invalid.
[[nodiscard]] inline EstimateGrid estimate_grid(const Trajectory& traj, std::span<const double> grid, double bandwidth,
                                                const Kernel& kernel) {
    detail::require(!grid.empty(), "grid must not be empty");
    for (double u : grid) {
        check_estimate_inputs(traj, 1, u, bandwidth);
    }
    EstimateGrid out;
    out.period = traj.period;
    out.n = traj.n;
    out.grid.assign(grid.begin(), grid.end());
    out.bandwidth = bandwidth;
    out.kernel_name = kernel.name;
    out.kernel_l2 = kernel.l2_norm_sq;
    out.cells.resize(static_cast<std::size_t>(traj.period) * grid.size());
    const double min_denominator = degeneracy_floor(traj);
    for (int s = 1; s <= traj.period; ++s) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto plan = make_weight_plan(traj.n, traj.period, s, grid[i], bandwidth, kernel);
            if (const auto est = try_estimate(traj, plan, min_denominator)) {
                auto& c = out.cell(s, i);
                c.valid = true;
                c.a_hat = est->a_hat;
                c.numerator = est->numerator;
                c.denominator = est->denominator;
            }
        }
    }
    if (out.missing() == out.cells.size()) {
        throw DegenerateDenominator("every grid cell has a degenerate denominator");
    }
    return out;
}

struct StudentizationRatio {
    double ratio = 1.0;   ///< sigma^2 / gamma^(2)_{s-1} in estimated coefficients
    bool clamped = false;
};

/**
 * @brief Plug-in sigma^2 / gamma^(2) for season s.
 *
 * The estimator's denominator averages X_{j-1}^2 with j = s (mod T), i.e. the
 * local variance of season s - 1, so the products start at a_hat_{s-1}.
 * `a_hats[k]` holds a_hat_{k+1}(u).
 */
[[nodiscard]] inline StudentizationRatio studentization_ratio(std::span<const double> a_hats, int season) {
    const int period = static_cast<int>(a_hats.size());
    auto at = [&](int k) {
        const int idx = ((k - 1) % period + period) % period;
        return a_hats[static_cast<std::size_t>(idx)];
    };
    double product = 1.0;
    double sum = 1.0;
    for (int j = 0; j < period; ++j) {
        const double a = at(season - 1 - j);
        product *= a * a;
        if (j + 1 < period) {
            sum += product;
        }
    }
    StudentizationRatio r;
    if (product > product_clamp) {
        product = product_clamp;
        r.clamped = true;
    }
    r.ratio = (1.0 - product) / sum;
    return r;
}

/// Asymptotic sd of a_hat: sqrt(int K^2 / (n b) * sigma^2 / gamma).
[[nodiscard]] inline double asymptotic_stderr(std::size_t n, double bandwidth, double kernel_l2, double ratio) {
    return std::sqrt(kernel_l2 / (static_cast<double>(n) * bandwidth) * ratio);
}

/// Fills stderr and a two-sided `level` confidence interval for every cell
/// whose full set of seasons at that u is valid.
[[nodiscard]] inline EstimateGrid asymptotic_ci(EstimateGrid est, double level) {
    detail::require(level > 0.0 && level < 1.0, "confidence level must lie in (0,1)");
    const double z = normal_quantile(0.5 * (1.0 + level));
    std::vector<double> column(static_cast<std::size_t>(est.period));
    for (std::size_t i = 0; i < est.grid.size(); ++i) {
        bool complete = true;
        for (int s = 1; s <= est.period; ++s) {
            const auto& c = est.cell(s, i);
            complete = complete && c.valid;
            column[static_cast<std::size_t>(s - 1)] = c.a_hat;
        }
        for (int s = 1; s <= est.period; ++s) {
            auto& c = est.cell(s, i);
            if (!c.valid || !complete) {
                continue;
            }
            const auto r = studentization_ratio(column, s);
            c.std_error = asymptotic_stderr(est.n, est.bandwidth, est.kernel_l2, r.ratio);
            c.clamped = r.clamped;
            c.ci_lo = c.a_hat - z * c.std_error;
            c.ci_hi = c.a_hat + z * c.std_error;
        }
    }
    est.ci_level = level;
    return est;
}

namespace detail {

inline double central_first(const CoefficientFunction& f, double u, double h) {
    return (f(u + h) - f(u - h)) / (2.0 * h);
}

inline double central_second(const CoefficientFunction& f, double u, double h) {
    return (f(u + h) - 2.0 * f(u) + f(u - h)) / (h * h);
}

} // namespace detail

/**
 * @brief Limit mean of sqrt(n b_n)(a_hat_s(u) - a_s(u)) when b_n = c n^{-1/5}.
 *
 * mu(u) = c^{5/2} / gamma (a_s'' gamma / 2 + a_s' gamma') int z^2 K, with gamma
 * the local variance of the lagged regressor (season s - 1). Derivatives are
 * central differences: step 1e-5 for first derivatives, 1e-4 for a_s''.
 *
 * @throws DerivativeUnavailable for piecewise-linear coefficient functions.
 */
[[nodiscard]] inline double bias_mu(const CoefficientFamily& coeffs, const NoiseModel& noise, int season, double u,
                                    double c, const Kernel& kernel) {
    detail::require(season >= 1 && season <= coeffs.period(), "season must lie in 1..T");
    detail::require(u > 0.0 && u < 1.0, "u must lie strictly inside (0,1)");
    detail::require(c > 0.0, "bandwidth constant must be positive");
    for (int s = 1; s <= coeffs.period(); ++s) {
        if (!coeffs.function(s).differentiable()) {
            throw DerivativeUnavailable("derivative unavailable: season " + std::to_string(s) +
                                        " is a piecewise-linear interpolant");
        }
    }
    constexpr double h1 = 1e-5;
    constexpr double h2 = 1e-4;
    const auto& a = coeffs.function(season);
    const long long lagged = season - 1;
    const double g = theoretical_gamma2(coeffs, noise, lagged, u);
    const double g_prime = (theoretical_gamma2(coeffs, noise, lagged, u + h1) -
                            theoretical_gamma2(coeffs, noise, lagged, u - h1)) /
                           (2.0 * h1);
    const double a1 = detail::central_first(a, u, h1);
    const double a2 = detail::central_second(a, u, h2);
    return std::pow(c, 2.5) / g * (0.5 * a2 * g + a1 * g_prime) * kernel.second_moment;
}

struct TestResult {
    double statistic = 0.0;
    double null_value = 0.0;
    double p_value = 1.0;
    bool reject_at_5pct = false;
    double a_hat = 0.0;
    double std_error = 0.0;
    bool clamped = false;
};

/**
 * @brief Studentized test of H0: a_s(u) = c_a.
 *
 * Estimates every season at u for the plug-in variance, then compares
 * (a_hat_s(u) - c_a) / stderr against the standard normal.
 */
[[nodiscard]] inline TestResult test_statistic(const Trajectory& traj, int season, double u, double null_value,
                                               double bandwidth, const Kernel& kernel) {
    check_estimate_inputs(traj, season, u, bandwidth);
    std::vector<double> a_hats(static_cast<std::size_t>(traj.period));
    for (int s = 1; s <= traj.period; ++s) {
        a_hats[static_cast<std::size_t>(s - 1)] = estimate(traj, s, u, bandwidth, kernel).a_hat;
    }
    const auto r = studentization_ratio(a_hats, season);
    TestResult out;
    out.a_hat = a_hats[static_cast<std::size_t>(season - 1)];
    out.null_value = null_value;
    out.std_error = asymptotic_stderr(traj.n, bandwidth, kernel.l2_norm_sq, r.ratio);
    out.clamped = r.clamped;
    out.statistic = (out.a_hat - null_value) / out.std_error;
    out.p_value = two_sided_p_value(out.statistic);
    out.reject_at_5pct = out.p_value < 0.05;
    return out;
}

} // namespace ptvar
