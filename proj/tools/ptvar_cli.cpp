// Command-line front end: simulation, estimation, bandwidth scans,
// Monte-Carlo tables, period selection, tests and real-data profiles.

#include "ptvar/ptvar.hpp"
#include "ptvar/report_json.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace ptvar;
using nlohmann::json;

namespace {

constexpr const char* tool_version = "1.0.0";

struct Globals {
    std::uint64_t seed = 1;
    unsigned threads = default_threads();
    std::string output;
};

/// Writes to --output when given, stdout otherwise.
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_) {
                throw Error(ErrorCategory::io_error, "cannot write '" + path + "'");
            }
        }
    }
    std::ostream& out() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

void write_sidecar(const std::string& path, const json& j) {
    if (path.empty()) {
        std::cerr << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw Error(ErrorCategory::io_error, "cannot write '" + path + "'");
    }
    out << j.dump(2) << '\n';
}

std::string sidecar_path(const std::string& explicit_path, const Globals& g) {
    if (!explicit_path.empty()) {
        return explicit_path;
    }
    return g.output.empty() ? std::string{} : g.output + ".json";
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0) {
            detail::fail("cannot parse number '" + item + "' in list '" + text + "'");
        }
        out.push_back(v);
    }
    detail::require(!out.empty(), "empty list");
    return out;
}

std::vector<double> parse_u_list(const std::string& text) {
    return text == "grid99" ? default_grid() : parse_list(text);
}

// Options shared by commands that build the model from flags.
struct ModelOptions {
    std::string function = "cosine";
    int period = 2;
    std::string constants;
    double hurst = 0.8;
    std::uint64_t path_seed = default_path_seed;
    std::string noise = "gaussian";
    double variance = 4.0;
    double df = 3.0;

    void add_to(CLI::App* app) {
        app->add_option("--function", function, "cosine | wiener | wiener-integral | fbm")->capture_default_str();
        app->add_option("--period,-T", period, "period T")->capture_default_str();
        app->add_option("--constants", constants, "frozen coefficients a_1,..,a_T (overrides --function)");
        app->add_option("--hurst", hurst, "Hurst exponent for --function fbm")->capture_default_str();
        app->add_option("--path-seed", path_seed, "seed of the random test-function path")->capture_default_str();
        app->add_option("--noise", noise, "gaussian | t")->capture_default_str();
        app->add_option("--variance", variance, "Gaussian noise variance")->capture_default_str();
        app->add_option("--df", df, "Student-t degrees of freedom")->capture_default_str();
    }

    [[nodiscard]] CoefficientFamily coefficients() const {
        if (!constants.empty()) {
            return CoefficientFamily::constant(parse_list(constants));
        }
        return make_test_function(path_kind_by_name(function), period, path_seed, hurst);
    }

    [[nodiscard]] std::string function_label() const {
        if (!constants.empty()) {
            return "constant(" + constants + ")";
        }
        return function_id(path_kind_by_name(function), hurst);
    }

    [[nodiscard]] NoiseModel noise_model() const {
        if (noise == "gaussian") {
            return NoiseModel::gaussian(variance);
        }
        if (noise == "t" || noise == "student-t") {
            return NoiseModel::student_t(df);
        }
        detail::fail("unknown noise '" + noise + "' (expected gaussian|t)");
    }

    [[nodiscard]] json to_json() const {
        return {{"function", function_label()}, {"period", coefficients().period()}, {"noise", noise_model().id()},
                {"path_seed", path_seed}};
    }
};

struct InputOptions {
    std::string input;
    std::string time_column = "t";
    std::string value_column = "x";

    void add_to(CLI::App* app) {
        app->add_option("--input,-i", input, "CSV file with a header row")->required();
        app->add_option("--time-column", time_column, "time column name")->capture_default_str();
        app->add_option("--value-column", value_column, "value column name")->capture_default_str();
    }

    [[nodiscard]] SeriesFile load() const {
        ColumnMapping m;
        m.time = time_column;
        m.value = value_column;
        auto s = ingest_csv(input, m);
        if (!s.dropped_lines.empty()) {
            std::cerr << "note: dropped " << s.dropped_lines.size() << " row(s) with missing values\n";
        }
        return s;
    }
};

json run_metadata(const Globals& g, const std::string& command) {
    return {{"command", command}, {"seed", g.seed}, {"threads", g.threads}, {"version", tool_version}};
}

/**
 * Replaces `--config FILE` by the `--key value` pairs it holds, placed right
 * after the subcommand name so that flags given on the command line win.
 */
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    const auto at = std::find(args.begin(), args.end(), "--config");
    if (at == args.end() || at + 1 == args.end()) {
        std::reverse(args.begin(), args.end());
        return args;
    }
    const std::string path = *(at + 1);
    const auto pos = args.erase(at, at + 2) - args.begin();
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCategory::io_error, "cannot open config '" + path + "'");
    }
    std::vector<std::string> injected;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(std::string_view(line).substr(0, line.find('#')));
        if (body.empty() || body.front() == '[') {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(path + ": line " + std::to_string(line_no) + ": expected key = value", line_no);
        }
        auto value = std::string(detail::trim(body.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        injected.push_back("--" + std::string(detail::trim(body.substr(0, eq))));
        injected.push_back(value);
    }
    // the config sits inside the subcommand's arguments: splice before them
    auto sub = std::find(args.begin(), args.end(), "montecarlo");
    const auto insert_at = sub == args.end() ? args.begin() + pos : sub + 1;
    args.insert(insert_at, injected.begin(), injected.end());
    std::reverse(args.begin(), args.end());
    return args;
}

std::string fmt(double v) {
    return format_double(v);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Periodic locally stationary AR(1) toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", tool_version);
    Globals g;
    app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads")->capture_default_str();
    app.add_option("--output,-o", g.output, "output file (default stdout)");

    // simulate
    auto* sim = app.add_subcommand("simulate", "simulate a trajectory and write t,x CSV");
    ModelOptions sim_model;
    std::size_t sim_n = 1000;
    sim_model.add_to(sim);
    sim->add_option("--n,-n", sim_n, "number of periods")->capture_default_str();

    // estimate
    auto* est = app.add_subcommand("estimate", "kernel estimates of a_s(u) with pointwise intervals");
    InputOptions est_in;
    est_in.add_to(est);
    int est_period = 1;
    std::string est_season = "all";
    std::string est_u = "grid99";
    std::string est_bandwidth = "auto";
    std::string est_kernel = "epanechnikov";
    double est_ci = 0.95;
    est->add_option("--period,-T", est_period, "period T")->required();
    est->add_option("--season", est_season, "season s or 'all'")->capture_default_str();
    est->add_option("--u", est_u, "comma list of u or 'grid99'")->capture_default_str();
    est->add_option("--bandwidth", est_bandwidth, "bandwidth b or 'auto' (cross-validated lambda)")
        ->capture_default_str();
    est->add_option("--kernel", est_kernel, "epanechnikov | gaussian")->capture_default_str();
    est->add_option("--ci", est_ci, "confidence level")->capture_default_str();

    // mise-scan
    auto* mise = app.add_subcommand("mise-scan", "lambda scan of root-MISE on one simulated trajectory");
    ModelOptions mise_model;
    mise_model.add_to(mise);
    std::size_t mise_n = 1000;
    std::string mise_kernel = "epanechnikov";
    std::string mise_json;
    mise->add_option("--n,-n", mise_n, "number of periods")->capture_default_str();
    mise->add_option("--kernel", mise_kernel, "epanechnikov | gaussian")->capture_default_str();
    mise->add_option("--json", mise_json, "metadata sidecar path (default <output>.json)");

    // montecarlo
    auto* mc = app.add_subcommand("montecarlo", "replicated MISE scans: lambda_bar and mean root-MISE");
    mc->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    std::string mc_config;
    mc->add_option("--config", mc_config, "key = value file with any of these options; flags override it");
    ModelOptions mc_model;
    mc_model.add_to(mc);
    std::string mc_n = "1000";
    std::size_t mc_reps = 1000;
    std::string mc_kernel = "epanechnikov";
    std::string mc_json;
    mc->add_option("--n,-n", mc_n, "number of periods, or a comma list for several rows")->capture_default_str();
    mc->add_option("--replications,-R", mc_reps, "replications")->capture_default_str();
    mc->add_option("--kernel", mc_kernel, "epanechnikov | gaussian")->capture_default_str();
    mc->add_option("--json", mc_json, "JSON sidecar path (default <output>.json, stderr without --output)");

    // period-cv
    auto* pcv = app.add_subcommand("period-cv", "cross-validated period estimate");
    InputOptions pcv_in;
    pcv_in.add_to(pcv);
    int pcv_tmax = 12;
    std::string pcv_style = "loo";
    std::string pcv_kernel = "epanechnikov";
    std::string pcv_json;
    pcv->add_option("--t-max", pcv_tmax, "largest candidate period")->capture_default_str();
    pcv->add_option("--cv-style", pcv_style, "loo | paper")->capture_default_str();
    pcv->add_option("--kernel", pcv_kernel, "epanechnikov | gaussian")->capture_default_str();
    pcv->add_option("--json", pcv_json, "metadata sidecar path (default <output>.json)");

    // test
    auto* tst = app.add_subcommand("test", "studentized test of H0: a_s(u) = c");
    InputOptions tst_in;
    tst_in.add_to(tst);
    int tst_period = 1;
    int tst_season = 1;
    std::string tst_u = "0.5";
    double tst_null = 0.0;
    double tst_bandwidth = 0.0;
    std::string tst_kernel = "epanechnikov";
    tst->add_option("--period,-T", tst_period, "period T")->required();
    tst->add_option("--season", tst_season, "season s")->capture_default_str();
    tst->add_option("--u", tst_u, "comma list of u")->capture_default_str();
    tst->add_option("--null", tst_null, "hypothesized value c")->required();
    tst->add_option("--bandwidth", tst_bandwidth, "bandwidth (default n^{-1/3})");
    tst->add_option("--kernel", tst_kernel, "epanechnikov | gaussian")->capture_default_str();

    // analyze
    auto* ana = app.add_subcommand("analyze", "deseasonalize a series and profile a_s(u) per season");
    InputOptions ana_in;
    ana_in.add_to(ana);
    int ana_period = 0;
    int ana_tmax = 12;
    std::string ana_u = "0.25,0.5,0.75";
    double ana_bandwidth = 0.0;
    std::string ana_kernel = "epanechnikov";
    std::optional<double> ana_ci;
    bool ana_raw = false;
    int ana_window = 0;
    ana->add_option("--period,-T", ana_period, "period T (default: cross-validated up to --t-max)");
    ana->add_option("--t-max", ana_tmax, "largest candidate period when --period is absent")->capture_default_str();
    ana->add_option("--u", ana_u, "comma list of u")->capture_default_str();
    ana->add_option("--bandwidth", ana_bandwidth, "bandwidth (default n^{-1/5})");
    ana->add_option("--kernel", ana_kernel, "epanechnikov | gaussian")->capture_default_str();
    ana->add_option("--ci", ana_ci, "add ci_lo,ci_hi columns at this level");
    ana->add_flag("--no-deseasonalize", ana_raw, "use the series as is");
    ana->add_option("--trend-window", ana_window, "odd moving-average width (default 2T+1)");

    std::vector<std::string> args;
    try {
        args = expand_config(argc, argv);
    } catch (const Error& e) {
        std::cerr << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
        return static_cast<int>(e.category());
    }
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << category_name(ErrorCategory::invalid_argument) << ": " << e.what() << '\n';
        return static_cast<int>(ErrorCategory::invalid_argument);
    }

    try {
        detail::require(g.threads >= 1, "--threads must be at least 1");

        if (*sim) {
            const auto coeffs = sim_model.coefficients();
            const auto traj = simulate(coeffs, sim_model.noise_model(), sim_n, g.seed);
            Sink sink(g.output);
            write_trajectory_csv(sink.out(), traj);
            if (!g.output.empty()) {
                auto meta = run_metadata(g, "simulate");
                meta["model"] = sim_model.to_json();
                meta["n"] = sim_n;
                write_sidecar(g.output + ".json", meta);
            }
            return 0;
        }

        if (*est) {
            const auto series = est_in.load();
            const auto traj = Trajectory::from_series(series.values, est_period);
            const auto kernel = kernel_by_name(est_kernel);
            const auto grid = parse_u_list(est_u);
            double b = 0.0;
            if (est_bandwidth == "auto") {
                const double lambda = cv_select_lambda(traj.values, est_period, default_lambda_grid(), kernel);
                b = std::pow(static_cast<double>(traj.n), -lambda);
                std::cerr << "bandwidth: lambda=" << lambda << " b=" << b << '\n';
            } else {
                b = parse_list(est_bandwidth).at(0);
            }
            const auto result = asymptotic_ci(estimate_grid(traj, grid, b, kernel), est_ci);
            int s_lo = 1;
            int s_hi = est_period;
            if (est_season != "all") {
                s_lo = s_hi = static_cast<int>(parse_list(est_season).at(0));
                detail::require(s_lo >= 1 && s_lo <= est_period, "--season must lie in 1..T");
            }
            Sink sink(g.output);
            auto& out = sink.out();
            out << "s,u,a_hat,stderr,ci_lo,ci_hi\n";
            for (int s = s_lo; s <= s_hi; ++s) {
                for (std::size_t i = 0; i < grid.size(); ++i) {
                    const auto& c = result.cell(s, i);
                    out << s << ',' << fmt(grid[i]) << ',' << fmt(c.a_hat) << ',' << fmt(c.std_error) << ','
                        << fmt(c.ci_lo) << ',' << fmt(c.ci_hi) << '\n';
                }
            }
            if (result.missing() > 0) {
                std::cerr << "note: " << result.missing() << " degenerate cell(s) reported as nan\n";
            }
            return 0;
        }

        if (*mise) {
            const auto coeffs = mise_model.coefficients();
            const auto traj = simulate(coeffs, mise_model.noise_model(), mise_n, g.seed);
            const auto scan = mise_scan(traj, coeffs, default_grid(), default_lambda_grid(), kernel_by_name(mise_kernel));
            Sink sink(g.output);
            auto& out = sink.out();
            out << "lambda";
            for (int s = 1; s <= traj.period; ++s) {
                out << ",mise_s" << s;
            }
            out << ",root_mise,degenerate\n";
            for (std::size_t l = 0; l < scan.lambda_grid.size(); ++l) {
                out << fmt(scan.lambda_grid[l]);
                for (double v : scan.mise[l]) {
                    out << ',' << fmt(v);
                }
                out << ',' << fmt(scan.total_root_mise[l]) << ',' << scan.degenerate[l] << '\n';
            }
            std::cerr << "lambda_hat=" << scan.lambda_hat << " root_mise=" << scan.best_total << '\n';
            auto meta = run_metadata(g, "mise-scan");
            meta["model"] = mise_model.to_json();
            meta["n"] = mise_n;
            meta["kernel"] = mise_kernel;
            meta["lambda_hat"] = scan.lambda_hat;
            meta["root_mise"] = scan.best_total;
            const auto side = sidecar_path(mise_json, g);
            if (!side.empty()) {
                write_sidecar(side, meta);
            }
            return 0;
        }

        if (*mc) {
            const auto coeffs = mc_model.coefficients();
            const auto noise = mc_model.noise_model();
            const auto kernel = kernel_by_name(mc_kernel);
            Sink sink(g.output);
            auto& out = sink.out();
            out << "function,noise,kernel,T,n,R,dropped,lambda_bar,lambda_bar_se,mean_root_mise,mean_root_mise_se\n";
            json reports = json::array();
            for (double nv : parse_list(mc_n)) {
                detail::require(nv >= 1 && nv == std::floor(nv), "--n values must be positive integers");
                const auto report = monte_carlo(MonteCarloConfig{.coeffs = coeffs,
                                                                 .noise = noise,
                                                                 .kernel = kernel,
                                                                 .n = static_cast<std::size_t>(nv),
                                                                 .replications = mc_reps,
                                                                 .master_seed = g.seed,
                                                                 .function_id = mc_model.function_label(),
                                                                 .threads = g.threads});
                out << report.function_id << ',' << report.noise_id << ',' << report.kernel_id << ','
                    << report.period << ',' << report.n << ',' << report.replications << ',' << report.dropped << ','
                    << fmt(report.lambda_bar) << ',' << fmt(report.lambda_bar_se) << ','
                    << fmt(report.mean_root_mise) << ',' << fmt(report.mean_root_mise_se) << '\n';
                out.flush();
                reports.push_back(to_json(report));
            }
            auto meta = run_metadata(g, "montecarlo");
            meta["model"] = mc_model.to_json();
            meta["reports"] = reports;
            write_sidecar(sidecar_path(mc_json, g), meta);
            return 0;
        }

        if (*pcv) {
            const auto series = pcv_in.load();
            const auto scan = cv_period(series.values, pcv_tmax, kernel_by_name(pcv_kernel), cv_style_by_name(pcv_style));
            Sink sink(g.output);
            auto& out = sink.out();
            out << "tau,cv\n";
            std::size_t fallbacks = 0;
            for (std::size_t k = 0; k < scan.cv.size(); ++k) {
                out << k + 1 << ',' << fmt(scan.cv[k]) << '\n';
                fallbacks += scan.fallbacks[k];
            }
            std::cerr << "T_hat=" << scan.t_hat << '\n';
            if (fallbacks > 0) {
                std::cerr << "note: " << fallbacks << " degenerate term(s) predicted as zero\n";
            }
            auto meta = run_metadata(g, "period-cv");
            meta["input"] = pcv_in.input;
            meta["t_max"] = pcv_tmax;
            meta["cv_style"] = pcv_style;
            meta["T_hat"] = scan.t_hat;
            meta["fallbacks"] = scan.fallbacks;
            const auto side = sidecar_path(pcv_json, g);
            if (!side.empty()) {
                write_sidecar(side, meta);
            }
            return 0;
        }

        if (*tst) {
            const auto series = tst_in.load();
            const auto traj = Trajectory::from_series(series.values, tst_period);
            const double b = tst_bandwidth > 0.0 ? tst_bandwidth : std::pow(static_cast<double>(traj.n), -1.0 / 3.0);
            const auto kernel = kernel_by_name(tst_kernel);
            Sink sink(g.output);
            auto& out = sink.out();
            out << "s,u,null,a_hat,stderr,statistic,p_value,reject_5pct\n";
            for (double u : parse_list(tst_u)) {
                const auto r = test_statistic(traj, tst_season, u, tst_null, b, kernel);
                out << tst_season << ',' << fmt(u) << ',' << fmt(r.null_value) << ',' << fmt(r.a_hat) << ','
                    << fmt(r.std_error) << ',' << fmt(r.statistic) << ',' << fmt(r.p_value) << ','
                    << (r.reject_at_5pct ? 1 : 0) << '\n';
            }
            return 0;
        }

        if (*ana) {
            const auto series = ana_in.load();
            const auto kernel = kernel_by_name(ana_kernel);
            int period = ana_period;
            if (period <= 0) {
                period = cv_period(series.values, ana_tmax, kernel).t_hat;
                std::cerr << "period: T_hat=" << period << " (cross-validated)\n";
            }
            std::vector<double> values = series.values;
            if (!ana_raw) {
                values = deseasonalize(values, period,
                                       ana_window > 0 ? std::optional<int>(ana_window) : std::nullopt)
                             .residual;
            }
            const auto rows = analyze(values, period, parse_list(ana_u), kernel,
                                      ana_bandwidth > 0.0 ? std::optional<double>(ana_bandwidth) : std::nullopt,
                                      ana_ci.value_or(0.95));
            Sink sink(g.output);
            auto& out = sink.out();
            out << "s,u,a_hat,stderr" << (ana_ci ? ",ci_lo,ci_hi" : "") << '\n';
            for (const auto& r : rows) {
                out << r.season << ',' << fmt(r.u) << ',' << fmt(r.a_hat) << ',' << fmt(r.std_error);
                if (ana_ci) {
                    out << ',' << fmt(r.ci_lo) << ',' << fmt(r.ci_hi);
                }
                out << '\n';
            }
            return 0;
        }
    } catch (const ParseError& e) {
        std::cerr << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const Error& e) {
        std::cerr << "error: " << category_name(e.category()) << ": " << e.what() << '\n';
        return static_cast<int>(e.category());
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
