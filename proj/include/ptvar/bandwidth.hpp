#pragma once

#include "ptvar/error.hpp"
#include "ptvar/estimator.hpp"
#include "ptvar/kernels.hpp"
#include "ptvar/parallel.hpp"
#include "ptvar/process.hpp"
#include "ptvar/rng.hpp"
#include "ptvar/stats.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace ptvar {

/// lambda = 0.10, 0.11, ..., 0.80 (b_n = n^{-lambda}).
[[nodiscard]] inline std::vector<double> default_lambda_grid() {
    std::vector<double> g;
    for (int i = 10; i <= 80; ++i) {
        g.push_back(i / 100.0);
    }
    return g;
}

/**
 * @brief Precomputed weight plans for every (lambda, season, u) cell.
 *
 * Shared read-only by all replications of one Monte-Carlo configuration.
 */
class MisePlan {
public:
    MisePlan(std::size_t n, int period, std::span<const double> grid, std::span<const double> lambdas,
             const Kernel& kernel)
        : n_(n), period_(period), grid_(grid.begin(), grid.end()), lambdas_(lambdas.begin(), lambdas.end()),
          kernel_(kernel) {
        detail::require(n >= 1 && period >= 1, "MISE plan needs n >= 1 and T >= 1");
        detail::require(!grid_.empty() && !lambdas_.empty(), "MISE plan needs a u-grid and a lambda grid");
        for (double u : grid_) {
            detail::require(u > 0.0 && u < 1.0, "grid points must lie strictly inside (0,1)");
        }
        plans_.reserve(lambdas_.size() * static_cast<std::size_t>(period) * grid_.size());
        for (double lambda : lambdas_) {
            const double b = bandwidth(lambda);
            for (int s = 1; s <= period; ++s) {
                for (double u : grid_) {
                    plans_.push_back(make_weight_plan(n, period, s, u, b, kernel));
                }
            }
        }
    }

    [[nodiscard]] double bandwidth(double lambda) const {
        return std::pow(static_cast<double>(n_), -lambda);
    }

    [[nodiscard]] const WeightPlan& plan(std::size_t lambda_index, int season, std::size_t i) const {
        return plans_[(lambda_index * static_cast<std::size_t>(period_) + static_cast<std::size_t>(season - 1)) *
                          grid_.size() +
                      i];
    }

    [[nodiscard]] std::size_t n() const noexcept { return n_; }
    [[nodiscard]] int period() const noexcept { return period_; }
    [[nodiscard]] const std::vector<double>& grid() const noexcept { return grid_; }
    [[nodiscard]] const std::vector<double>& lambdas() const noexcept { return lambdas_; }
    [[nodiscard]] const Kernel& kernel() const noexcept { return kernel_; }

private:
    std::size_t n_;
    int period_;
    std::vector<double> grid_;
    std::vector<double> lambdas_;
    Kernel kernel_;
    std::vector<WeightPlan> plans_;
};

struct MiseScan {
    std::vector<double> lambda_grid;
    std::vector<std::vector<double>> mise;   ///< [lambda][season - 1]
    std::vector<double> total_root_mise;     ///< sum_s sqrt(MISE_s) per lambda
    std::vector<std::size_t> degenerate;     ///< degenerate cells per lambda
    std::size_t best_index = 0;
    double lambda_hat = 0.0;
    double best_total = 0.0;
    std::uint64_t replication = 0;
};

/**
 * @brief Per-lambda MISE of a_hat against the known truth.
 *
 * MISE_s(lambda) = mean_i (a_hat_s(u_i) - a_s(u_i))^2 with b_n = n^{-lambda}.
 * A degenerate cell is charged a_s(u_i)^2, as if a_hat were zero. lambda_hat
 * minimizes sum_s sqrt(MISE_s); ties go to the smaller lambda.
 *
 * @throws DegenerateDenominator if more than half the cells are degenerate
 * at every lambda.
 */
[[nodiscard]] inline MiseScan mise_scan(const Trajectory& traj, const CoefficientFamily& truth, const MisePlan& plan) {
    detail::require(traj.n == plan.n() && traj.period == plan.period(), "trajectory shape does not match MISE plan");
    detail::require(truth.period() == traj.period, "truth period does not match trajectory");
    const auto& grid = plan.grid();
    const std::size_t m = grid.size();
    const auto period = static_cast<std::size_t>(traj.period);

    std::vector<double> truth_values(period * m);
    for (std::size_t s = 0; s < period; ++s) {
        for (std::size_t i = 0; i < m; ++i) {
            truth_values[s * m + i] = truth(static_cast<long long>(s) + 1, grid[i]);
        }
    }

    MiseScan scan;
    scan.lambda_grid = plan.lambdas();
    scan.replication = traj.seed;
    const double min_denominator = degeneracy_floor(traj);
    const std::size_t cells = period * m;
    bool usable = false;
    for (std::size_t l = 0; l < scan.lambda_grid.size(); ++l) {
        std::vector<double> per_season(period, 0.0);
        std::size_t degenerate = 0;
        for (std::size_t s = 0; s < period; ++s) {
            double acc = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double a = truth_values[s * m + i];
                const auto est = try_estimate(traj, plan.plan(l, static_cast<int>(s) + 1, i), min_denominator);
                double err = a;
                if (est) {
                    err = est->a_hat - a;
                } else {
                    ++degenerate;
                }
                acc += err * err;
            }
            per_season[s] = acc / static_cast<double>(m);
        }
        double total = 0.0;
        for (double v : per_season) {
            total += std::sqrt(v);
        }
        usable = usable || 2 * degenerate <= cells;
        scan.mise.push_back(std::move(per_season));
        scan.total_root_mise.push_back(total);
        scan.degenerate.push_back(degenerate);
        if (l == 0 || total < scan.best_total) {
            scan.best_total = total;
            scan.best_index = l;
        }
    }
    if (!usable) {
        throw DegenerateDenominator("more than half of the MISE cells are degenerate at every bandwidth");
    }
    scan.lambda_hat = scan.lambda_grid[scan.best_index];
    return scan;
}

[[nodiscard]] inline MiseScan mise_scan(const Trajectory& traj, const CoefficientFamily& truth,
                                        std::span<const double> grid, std::span<const double> lambda_grid,
                                        const Kernel& kernel) {
    return mise_scan(traj, truth, MisePlan(traj.n, traj.period, grid, lambda_grid, kernel));
}

struct MonteCarloConfig {
    CoefficientFamily coeffs;
    NoiseModel noise;
    Kernel kernel;
    std::size_t n = 1000;
    std::size_t replications = 1000;
    std::uint64_t master_seed = 1;
    std::string function_id = "custom";
    std::vector<double> grid = default_grid();
    std::vector<double> lambdas = default_lambda_grid();
    unsigned threads = 1;
};

struct MCReport {
    std::size_t n = 0;
    int period = 1;
    std::string function_id;
    std::string noise_id;
    std::string kernel_id;
    std::size_t replications = 0;
    std::size_t dropped = 0;
    std::uint64_t master_seed = 0;
    double lambda_bar = 0.0;
    double lambda_bar_se = 0.0;
    double mean_root_mise = 0.0;
    double mean_root_mise_se = 0.0;
    std::vector<double> lambda_hats;   ///< per replication, NaN when dropped
    std::vector<double> root_mises;    ///< sum_s sqrt(MISE_s(lambda_hat)), NaN when dropped

    /// Count of replications per selected lambda.
    [[nodiscard]] std::map<double, std::size_t> lambda_histogram() const {
        std::map<double, std::size_t> h;
        for (double l : lambda_hats) {
            if (!std::isnan(l)) {
                ++h[l];
            }
        }
        return h;
    }
};

/**
 * @brief R seeded replications of simulate -> mise_scan, aggregated.
 *
 * Replication r uses seed derive_seed(master_seed, r); results are reduced in
 * replication order, so the report does not depend on the thread count.
 */
[[nodiscard]] inline MCReport monte_carlo(const MonteCarloConfig& config) {
    detail::require(config.replications >= 1, "Monte-Carlo needs at least one replication");
    const MisePlan plan(config.n, config.coeffs.period(), config.grid, config.lambdas, config.kernel);

    struct Outcome {
        double lambda_hat = std::numeric_limits<double>::quiet_NaN();
        double root_mise = std::numeric_limits<double>::quiet_NaN();
    };
    const auto outcomes = parallel_map(config.replications, config.threads, [&](std::size_t r) {
        const auto traj = simulate(config.coeffs, config.noise, config.n, derive_seed(config.master_seed, r));
        Outcome o;
        try {
            const auto scan = mise_scan(traj, config.coeffs, plan);
            o.lambda_hat = scan.lambda_hat;
            o.root_mise = scan.best_total;
        } catch (const DegenerateDenominator&) {
        }
        return o;
    });

    MCReport report;
    report.n = config.n;
    report.period = config.coeffs.period();
    report.function_id = config.function_id;
    report.noise_id = config.noise.id();
    report.kernel_id = config.kernel.name;
    report.replications = config.replications;
    report.master_seed = config.master_seed;
    std::vector<double> lambdas;
    std::vector<double> mises;
    for (const auto& o : outcomes) {
        report.lambda_hats.push_back(o.lambda_hat);
        report.root_mises.push_back(o.root_mise);
        if (std::isnan(o.lambda_hat)) {
            ++report.dropped;
            continue;
        }
        lambdas.push_back(o.lambda_hat);
        mises.push_back(o.root_mise);
    }
    if (lambdas.empty()) {
        throw DegenerateDenominator("every Monte-Carlo replication was degenerate");
    }
    const auto ls = summarize(lambdas);
    const auto ms = summarize(mises);
    report.lambda_bar = ls.mean;
    report.lambda_bar_se = ls.standard_error();
    report.mean_root_mise = ms.mean;
    report.mean_root_mise_se = ms.standard_error();
    return report;
}

} // namespace ptvar
