// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Usage: acceptance [criterion numbers...]   (default: all)

#include "oracles.hpp"

#include "ptvar/ptvar.hpp"
#include "ptvar/report_json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <tuple>
#include <vector>

using namespace ptvar;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string format(const char* fmt, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, fmt, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Monte-Carlo reports are shared between criteria 2, 3 and 4.
using ReportKey = std::tuple<std::string, std::string, std::string, std::size_t, std::size_t>;
std::map<ReportKey, MCReport> report_cache;

constexpr std::uint64_t table_seed = 20150601;

const MCReport& table_report(PathKind kind, const std::string& kernel, const std::string& noise, std::size_t n,
                             std::size_t reps) {
    const ReportKey key{function_id(kind), kernel, noise, n, reps};
    auto it = report_cache.find(key);
    if (it == report_cache.end()) {
        MonteCarloConfig config{.coeffs = make_test_function(kind, 2, default_path_seed),
                                .noise = noise == "gaussian" ? NoiseModel::gaussian(4.0) : NoiseModel::student_t(3.0),
                                .kernel = kernel_by_name(kernel),
                                .n = n,
                                .replications = reps,
                                .master_seed = table_seed,
                                .function_id = function_id(kind),
                                .threads = default_threads()};
        it = report_cache.emplace(key, monte_carlo(config)).first;
    }
    return it->second;
}

// 1. gamma2 / gamma4 against recursion fixed points and simulated moments.
Outcome moment_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::vector<double>> families{{0.6}, {0.5, -0.8}, {0.9, -0.3, 0.6}};
    double worst_rel = 0.0;
    for (const auto& a : families) {
        const auto coeffs = CoefficientFamily::constant(a);
        for (const auto& noise : {NoiseModel::gaussian(4.0), NoiseModel::student_t(5.0)}) {
            const auto fixed = oracle::iterate_moments(a, noise.variance(), *noise.fourth_moment());
            for (std::size_t s = 1; s <= a.size(); ++s) {
                const double g2 = theoretical_gamma2(coeffs, noise, static_cast<long long>(s), 0.5);
                const double g4 = theoretical_gamma4(coeffs, noise, static_cast<long long>(s), 0.5);
                worst_rel = std::max(worst_rel, std::abs(g2 - fixed.variance[s - 1]) / fixed.variance[s - 1]);
                worst_rel = std::max(worst_rel, std::abs(g4 - fixed.fourth[s - 1]) / fixed.fourth[s - 1]);
            }
        }
    }

    // 10^5 independent paths, read at one time point per season after burn-in
    const std::size_t reps = 100000;
    int checks = 0;
    int within = 0;
    double worst_z = 0.0;
    for (const auto& a : families) {
        const auto coeffs = CoefficientFamily::constant(a);
        const auto noise = NoiseModel::gaussian(4.0);
        const std::size_t period = a.size();
        const std::size_t burn = 60 * period;
        std::vector<std::vector<double>> x2(period);
        std::vector<std::vector<double>> x4(period);
        for (std::size_t r = 0; r < reps; ++r) {
            Engine engine = make_engine(derive_seed(101, r));
            auto draw = noise.sampler();
            double x = 0.0;
            for (std::size_t t = 1; t <= burn + period; ++t) {
                x = a[(t - 1) % period] * x + draw(engine);
                if (t > burn) {
                    x2[(t - 1) % period].push_back(x * x);
                    x4[(t - 1) % period].push_back(x * x * x * x);
                }
            }
        }
        for (std::size_t s = 1; s <= period; ++s) {
            const auto m2 = summarize(x2[s - 1]);
            const auto m4 = summarize(x4[s - 1]);
            const double z2 = (m2.mean - theoretical_gamma2(coeffs, noise, static_cast<long long>(s), 0.5)) /
                              m2.standard_error();
            const double z4 = (m4.mean - theoretical_gamma4(coeffs, noise, static_cast<long long>(s), 0.5)) /
                              m4.standard_error();
            for (double z : {z2, z4}) {
                ++checks;
                within += std::abs(z) <= 3.0 ? 1 : 0;
                worst_z = std::max(worst_z, std::abs(z));
            }
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst_rel < 1e-10 && within == checks && elapsed < 60.0,
            format("max rel err vs fixed point %.2e (< 1e-10); empirical %d/%d within 3 SE (max |z| %.2f); %.1fs",
                   worst_rel, within, checks, worst_z, elapsed)};
}

// 2. Table 1 at desk scale: full R = 1000 and the R = 200 smoke variant.
Outcome table_one() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& r1000 = table_report(PathKind::cosine_c2, "epanechnikov", "gaussian", 1000, 1000);
    const auto& r200 = table_report(PathKind::cosine_c2, "epanechnikov", "gaussian", 200, 1000);
    const double full_time = seconds_since(t0);
    const bool full = std::abs(r1000.lambda_bar - 0.240) <= 0.05 && std::abs(r1000.mean_root_mise - 0.098) <= 0.02 &&
                      std::abs(r200.mean_root_mise - 0.185) <= 0.03;

    const auto t1 = std::chrono::steady_clock::now();
    const auto& s1000 = table_report(PathKind::cosine_c2, "epanechnikov", "gaussian", 1000, 200);
    const auto& s200 = table_report(PathKind::cosine_c2, "epanechnikov", "gaussian", 200, 200);
    const double smoke_time = seconds_since(t1);
    const bool smoke = std::abs(s1000.lambda_bar - 0.240) <= 0.075 &&
                       std::abs(s1000.mean_root_mise - 0.098) <= 0.03 && std::abs(s200.mean_root_mise - 0.185) <= 0.045 &&
                       smoke_time < 300.0;
    return {full && smoke,
            format("R=1000: n=1000 lambda_bar %.3f (0.240+-0.05), root-MISE %.4f (0.098+-0.02); n=200 root-MISE %.4f "
                   "(0.185+-0.03) [%.0fs]. R=200 smoke: %.3f, %.4f, %.4f (bands x1.5) [%.0fs]",
                   r1000.lambda_bar, r1000.mean_root_mise, r200.mean_root_mise, full_time, s1000.lambda_bar,
                   s1000.mean_root_mise, s200.mean_root_mise, smoke_time)};
}

// 3. Heavy-tailed innovations against the Gaussian baseline.
Outcome table_two_contrast() {
    const auto& gauss = table_report(PathKind::cosine_c2, "epanechnikov", "gaussian", 1000, 1000);
    const auto& heavy = table_report(PathKind::cosine_c2, "epanechnikov", "t3", 1000, 1000);
    const double ratio = heavy.mean_root_mise / gauss.mean_root_mise;
    return {ratio >= 1.4, format("t(3) root-MISE %.4f +- %.4f vs N(0,4) %.4f +- %.4f: ratio %.3f (need >= 1.4)",
                                 heavy.mean_root_mise, heavy.mean_root_mise_se, gauss.mean_root_mise,
                                 gauss.mean_root_mise_se, ratio)};
}

// 4. Root-MISE decreases in n for all 16 built-in configurations.
Outcome monotonicity() {
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<std::size_t> ns{100, 200, 500, 1000};
    int ok = 0;
    int total = 0;
    std::string failures;
    for (auto kind : {PathKind::cosine_c2, PathKind::wiener_integral, PathKind::fbm, PathKind::wiener}) {
        for (const std::string kernel : {"epanechnikov", "gaussian"}) {
            for (const std::string noise : {"gaussian", "t3"}) {
                std::vector<double> mise;
                for (std::size_t n : ns) {
                    mise.push_back(table_report(kind, kernel, noise, n, 1000).mean_root_mise);
                }
                bool decreasing = true;
                for (std::size_t k = 1; k < mise.size(); ++k) {
                    decreasing = decreasing && mise[k] < mise[k - 1];
                }
                ++total;
                ok += decreasing ? 1 : 0;
                std::printf("      %-5s %-12s %-8s root-MISE n=100..1000: %.4f %.4f %.4f %.4f%s\n",
                            function_id(kind).c_str(), kernel.c_str(), noise.c_str(), mise[0], mise[1], mise[2],
                            mise[3], decreasing ? "" : "  <- not decreasing");
                if (!decreasing) {
                    failures += " " + function_id(kind) + "/" + kernel + "/" + noise;
                }
            }
        }
    }
    return {ok == total, format("%d/%d configurations strictly decreasing (R=1000) [%.0fs]%s", ok, total,
                                seconds_since(t0), failures.c_str())};
}

// 5. Studentized errors: variance, normality, coverage.
Outcome clt() {
    const auto coeffs = make_test_function(PathKind::cosine_c2, 2, 0);
    const auto noise = NoiseModel::gaussian(4.0);
    const std::size_t n = 5000;
    const double b = std::pow(static_cast<double>(n), -1.0 / 3.0);
    const std::vector<double> us{0.25, 0.5, 0.75};
    const std::size_t reps = 2000;
    std::vector<std::vector<double>> z(6);
    std::vector<int> covered(6, 0);
    const auto fits = parallel_map(reps, default_threads(), [&](std::size_t r) {
        return asymptotic_ci(estimate_grid(simulate(coeffs, noise, n, derive_seed(505, r)), us, b, epanechnikov()),
                             0.95);
    });
    for (const auto& fit : fits) {
        for (int s = 1; s <= 2; ++s) {
            for (std::size_t i = 0; i < us.size(); ++i) {
                const auto& c = fit.cell(s, i);
                const double truth = coeffs(s, us[i]);
                const std::size_t k = static_cast<std::size_t>(s - 1) * 3 + i;
                z[k].push_back((c.a_hat - truth) / c.std_error);
                covered[k] += (c.ci_lo <= truth && truth <= c.ci_hi) ? 1 : 0;
            }
        }
    }
    bool pass = true;
    std::string text;
    for (int s = 1; s <= 2; ++s) {
        int jb_ok = 0;
        for (std::size_t i = 0; i < us.size(); ++i) {
            const std::size_t k = static_cast<std::size_t>(s - 1) * 3 + i;
            const double var = summarize(z[k]).variance;
            const auto jb = jarque_bera(z[k]);
            const double cover = static_cast<double>(covered[k]) / reps;
            jb_ok += jb.p_value > 0.01 ? 1 : 0;
            pass = pass && var >= 0.85 && var <= 1.15 && cover >= 0.92 && cover <= 0.97;
            text += format(" s=%d u=%.2f: var %.3f JB p %.3f cover %.3f;", s, us[i], var, jb.p_value, cover);
        }
        pass = pass && jb_ok >= 2;
    }
    return {pass, "n=5000 R=2000 b=n^-1/3 K_E;" + text};
}

// 6. Mean of the scaled error against mu(u) at b = n^{-1/5}.
Outcome bias_term() {
    const auto coeffs = make_test_function(PathKind::cosine_c2, 1, 0);
    const auto noise = NoiseModel::gaussian(4.0);
    const std::size_t n = 5000;
    const double u = 0.5;
    const double b = std::pow(static_cast<double>(n), -0.2);
    const double scale = std::sqrt(n * b);
    const auto errors = parallel_map(2000, default_threads(), [&](std::size_t r) {
        return scale * (estimate(simulate(coeffs, noise, n, derive_seed(606, r)), 1, u, b, epanechnikov()).a_hat -
                        coeffs(1, u));
    });
    const auto m = summarize(errors);
    const double mu = bias_mu(coeffs, noise, 1, u, 1.0, epanechnikov());
    const double z = (m.mean - mu) / m.standard_error();
    return {std::abs(z) <= 3.0, format("mean sqrt(nb)(a_hat - a) = %.4f +- %.4f vs mu(0.5) = %.4f: %.2f SE", m.mean,
                                       m.standard_error(), mu, z)};
}

// 7. Cross-validated period recovery.
Outcome period_recovery() {
    const auto coeffs = make_test_function(PathKind::cosine_c2, 2, 0);
    const auto hits = parallel_map(200, default_threads(), [&](std::size_t r) {
        return cv_period(simulate(coeffs, NoiseModel::gaussian(4.0), 1000, derive_seed(707, r)).values, 6,
                         epanechnikov())
            .t_hat;
    });
    const auto white = parallel_map(200, default_threads(), [&](std::size_t r) {
        return cv_period(simulate(CoefficientFamily::constant({0.0}), NoiseModel::gaussian(4.0), 2000,
                                  derive_seed(708, r))
                             .values,
                         6, epanechnikov())
            .t_hat;
    });
    const auto periodic = std::count(hits.begin(), hits.end(), 2);
    const auto ones = std::count(white.begin(), white.end(), 1);
    return {periodic >= 190 && ones >= 160,
            format("T=2 recovered %ld/200 (need >= 190); white noise T_hat=1 %ld/200 (need >= 160)", periodic, ones)};
}

// 8. Size and power of the studentized test.
Outcome size_power() {
    const std::size_t n = 1000;
    const double b = std::pow(static_cast<double>(n), -1.0 / 3.0);
    auto rate = [&](double truth, std::uint64_t seed, const Kernel& k) {
        const auto rejects = parallel_map(1000, default_threads(), [&](std::size_t r) {
            const auto traj = simulate(CoefficientFamily::constant({truth}), NoiseModel::gaussian(1.0), n,
                                       derive_seed(seed, r));
            return test_statistic(traj, 1, 0.5, 0.5, b, k).reject_at_5pct ? 1 : 0;
        });
        return std::accumulate(rejects.begin(), rejects.end(), 0) / 1000.0;
    };
    const double size = rate(0.5, 801, epanechnikov());
    const double power = rate(0.7, 802, epanechnikov());
    const double power_gauss = rate(0.7, 802, gaussian());
    return {size >= 0.03 && size <= 0.07 && power >= 0.90,
            format("K_E, b=n^-1/3, R=1000: size %.3f [0.03,0.07], power %.3f (>= 0.90); Gaussian kernel power %.3f",
                   size, power, power_gauss)};
}

// 9. fBm increments and covariance.
Outcome fbm_checks() {
    const std::size_t grid = std::size_t{1} << 14;
    double num = 0.0;
    double den = 0.0;
    for (int r = 0; r < 20; ++r) {
        const auto p = fbm_path(0.8, grid, derive_seed(909, r)).values;
        for (std::size_t k = 1; k + 1 < p.size(); ++k) {
            num += (p[k] - p[k - 1]) * (p[k + 1] - p[k]);
            den += (p[k] - p[k - 1]) * (p[k] - p[k - 1]);
        }
    }
    const double rho = num / den;
    const double expected_rho = std::pow(2.0, 0.6) - 1.0;

    const std::size_t small = 64;
    const std::vector<std::size_t> points{16, 32, 48, 64};
    const std::size_t reps = 20000;
    std::vector<double> acc(16, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
        const auto p = fbm_path(0.8, small, derive_seed(910, r)).values;
        for (std::size_t i = 0; i < 4; ++i) {
            for (std::size_t j = 0; j < 4; ++j) {
                acc[i * 4 + j] += p[points[i]] * p[points[j]];
            }
        }
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = i; j < 4; ++j) {
            const double s = static_cast<double>(points[i]) / small;
            const double t = static_cast<double>(points[j]) / small;
            const double c = 0.5 * (std::pow(s, 1.6) + std::pow(t, 1.6) - std::pow(std::abs(t - s), 1.6));
            worst = std::max(worst, std::abs(acc[i * 4 + j] / reps - c) / c);
        }
    }
    return {std::abs(rho - expected_rho) <= 0.05 && worst < 0.05,
            format("H=0.8 lag-1 increment corr %.4f vs %.4f (+-0.05); covariance max rel err %.3f over 10 pairs (< 0.05)",
                   rho, expected_rho, worst)};
}

// 10. Reports do not depend on the worker count.
Outcome determinism() {
    auto run = [](unsigned threads) {
        return monte_carlo(MonteCarloConfig{.coeffs = make_test_function(PathKind::cosine_c2, 2, 0),
                                            .noise = NoiseModel::student_t(3.0),
                                            .kernel = gaussian(),
                                            .n = 200,
                                            .replications = 100,
                                            .master_seed = 1010,
                                            .function_id = "a2",
                                            .threads = threads});
    };
    const auto a = run(1);
    const auto b = run(4);
    const auto c = run(3);
    const bool same = a.lambda_hats == b.lambda_hats && a.root_mises == b.root_mises && a.lambda_hats == c.lambda_hats &&
                      a.root_mises == c.root_mises && to_json(a).dump() == to_json(b).dump() &&
                      to_json(a).dump() == to_json(c).dump();
    return {same, format("threads 1/4/3 reports %s (lambda_bar %.17g, root-MISE %.17g)",
                         same ? "bit-identical" : "DIFFER", a.lambda_bar, a.mean_root_mise)};
}

} // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"moment oracle", moment_oracle},
        {"Table 1 reproduction", table_one},
        {"Table 2 contrast", table_two_contrast},
        {"monotonicity", monotonicity},
        {"CLT validation", clt},
        {"bias term", bias_term},
        {"period recovery", period_recovery},
        {"test size/power", size_power},
        {"fBm synthesizer", fbm_checks},
        {"determinism", determinism},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) {
        selected.insert(std::atoi(argv[i]));
    }
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.count(id)) {
            continue;
        }
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += o.pass ? 0 : 1;
        std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[k].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
