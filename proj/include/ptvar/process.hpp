#pragma once

#include "ptvar/error.hpp"
#include "ptvar/rng.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace ptvar {

/**
 * @brief One coefficient function v -> a(v) on [0,1].
 *
 * Either a closed-form callable or a piecewise-linear interpolant over a
 * uniform grid on [0,1]. Only closed forms can be differentiated.
 */
class CoefficientFunction {
public:
    static CoefficientFunction closed_form(std::function<double(double)> fn) {
        detail::require(static_cast<bool>(fn), "closed-form coefficient needs a callable");
        CoefficientFunction f;
        f.repr_ = std::move(fn);
        return f;
    }

    /// Linear interpolation of `values` placed at v_k = k / (size - 1).
    static CoefficientFunction interpolant(std::vector<double> values) {
        detail::require(values.size() >= 2, "interpolant needs at least two grid values");
        CoefficientFunction f;
        f.repr_ = std::make_shared<const std::vector<double>>(std::move(values));
        return f;
    }

    static CoefficientFunction constant(double c) {
        return closed_form([c](double) { return c; });
    }

    [[nodiscard]] double operator()(double v) const {
        if (const auto* fn = std::get_if<std::function<double(double)>>(&repr_)) {
            return (*fn)(v);
        }
        const auto& table = *std::get<Table>(repr_);
        const double x = std::clamp(v, 0.0, 1.0) * static_cast<double>(table.size() - 1);
        const auto k = std::min(static_cast<std::size_t>(x), table.size() - 2);
        const double w = x - static_cast<double>(k);
        return (1.0 - w) * table[k] + w * table[k + 1];
    }

    [[nodiscard]] bool differentiable() const noexcept {
        return std::holds_alternative<std::function<double(double)>>(repr_);
    }

    /// Grid values when this is an interpolant, empty otherwise.
    [[nodiscard]] std::span<const double> grid() const noexcept {
        if (const auto* t = std::get_if<Table>(&repr_)) {
            return **t;
        }
        return {};
    }

private:
    using Table = std::shared_ptr<const std::vector<double>>;
    CoefficientFunction() = default;
    std::variant<std::function<double(double)>, Table> repr_;
};

/**
 * @brief The T periodic coefficient functions a_1..a_T of the model.
 *
 * Seasons are 1-based and wrap modulo T in both directions, so a_0 == a_T and
 * a_{T+1} == a_1. Construction samples every function on a 10^4-point grid and
 * rejects families whose sup |a_s| is not strictly below one.
 */
class CoefficientFamily {
public:
    static constexpr std::size_t contractivity_grid = 10000;

    explicit CoefficientFamily(std::vector<CoefficientFunction> functions, double regularity = 2.0,
                               std::optional<double> declared_bound = std::nullopt)
        : functions_(std::move(functions)), regularity_(regularity) {
        detail::require(!functions_.empty(), "coefficient family needs at least one season");
        detail::require(regularity_ > 0.0, "regularity must be positive");
        double sup = 0.0;
        for (const auto& f : functions_) {
            for (std::size_t k = 0; k < contractivity_grid; ++k) {
                const double v = static_cast<double>(k) / static_cast<double>(contractivity_grid - 1);
                const double a = f(v);
                if (!std::isfinite(a)) {
                    throw Error(ErrorCategory::contractivity, "coefficient function is not finite on [0,1]");
                }
                sup = std::max(sup, std::abs(a));
            }
        }
        if (declared_bound) {
            if (!(*declared_bound >= 0.0 && *declared_bound < 1.0)) {
                throw Error(ErrorCategory::contractivity, "declared contractivity bound must lie in [0,1)");
            }
            if (sup > *declared_bound) {
                throw Error(ErrorCategory::contractivity,
                            "sampled sup |a_s| = " + std::to_string(sup) + " exceeds declared bound " +
                                std::to_string(*declared_bound));
            }
            alpha_ = *declared_bound;
        } else {
            if (!(sup < 1.0)) {
                throw Error(ErrorCategory::contractivity,
                            "sampled sup |a_s| = " + std::to_string(sup) + " is not below 1");
            }
            alpha_ = sup;
        }
    }

    /// Frozen (time-constant) coefficients, one per season.
    static CoefficientFamily constant(const std::vector<double>& values) {
        std::vector<CoefficientFunction> fs;
        fs.reserve(values.size());
        for (double c : values) {
            fs.push_back(CoefficientFunction::constant(c));
        }
        return CoefficientFamily(std::move(fs));
    }

    [[nodiscard]] int period() const noexcept { return static_cast<int>(functions_.size()); }
    [[nodiscard]] double alpha() const noexcept { return alpha_; }
    [[nodiscard]] double regularity() const noexcept { return regularity_; }

    /// Maps any integer season onto 1..T.
    [[nodiscard]] int wrap(long long s) const noexcept {
        const long long t = period();
        return static_cast<int>(((s - 1) % t + t) % t) + 1;
    }

    [[nodiscard]] const CoefficientFunction& function(long long s) const {
        return functions_[static_cast<std::size_t>(wrap(s) - 1)];
    }

    [[nodiscard]] double operator()(long long s, double v) const { return function(s)(v); }

private:
    std::vector<CoefficientFunction> functions_;
    double regularity_;
    double alpha_ = 0.0;
};

/**
 * @brief Law of the i.i.d. innovations.
 *
 * StudentT(nu) is unscaled, so its variance is nu / (nu - 2).
 */
class NoiseModel {
public:
    enum class Law { gaussian, student_t };

    static NoiseModel gaussian(double variance) {
        detail::require(variance > 0.0, "Gaussian noise variance must be positive");
        return NoiseModel(Law::gaussian, variance);
    }

    static NoiseModel student_t(double degrees_of_freedom) {
        detail::require(degrees_of_freedom > 2.0, "Student-t noise needs more than 2 degrees of freedom");
        return NoiseModel(Law::student_t, degrees_of_freedom);
    }

    [[nodiscard]] Law law() const noexcept { return law_; }
    [[nodiscard]] bool symmetric() const noexcept { return true; }

    /// Gaussian variance or Student-t degrees of freedom.
    [[nodiscard]] double parameter() const noexcept { return parameter_; }

    [[nodiscard]] double variance() const noexcept {
        return law_ == Law::gaussian ? parameter_ : parameter_ / (parameter_ - 2.0);
    }

    /// E(xi^4), or nullopt when infinite.
    [[nodiscard]] std::optional<double> fourth_moment() const noexcept {
        if (law_ == Law::gaussian) {
            return 3.0 * parameter_ * parameter_;
        }
        const double nu = parameter_;
        if (nu <= 4.0) {
            return std::nullopt;
        }
        return 3.0 * nu * nu / ((nu - 2.0) * (nu - 4.0));
    }

    [[nodiscard]] std::string id() const {
        if (law_ == Law::gaussian) {
            return "gaussian(" + trim_number(parameter_) + ")";
        }
        return "t(" + trim_number(parameter_) + ")";
    }

    /// Stateful sampler; create one per stream so draws are reproducible.
    class Sampler {
    public:
        explicit Sampler(const NoiseModel& m)
            : law_(m.law_), normal_(0.0, m.law_ == Law::gaussian ? std::sqrt(m.parameter_) : 1.0),
              student_(m.law_ == Law::student_t ? m.parameter_ : 3.0) {}

        double operator()(Engine& engine) {
            return law_ == Law::gaussian ? normal_(engine) : student_(engine);
        }

    private:
        Law law_;
        std::normal_distribution<double> normal_;
        std::student_t_distribution<double> student_;
    };

    [[nodiscard]] Sampler sampler() const { return Sampler(*this); }

private:
    NoiseModel(Law law, double parameter) : law_(law), parameter_(parameter) {}

    static std::string trim_number(double x) {
        std::string s = std::to_string(x);
        s.erase(s.find_last_not_of('0') + 1);
        if (!s.empty() && s.back() == '.') {
            s.pop_back();
        }
        return s;
    }

    Law law_;
    double parameter_;
};

/**
 * @brief An observed or simulated sample X_1..X_{nT}.
 *
 * `values[t - 1]` holds X_t. X_0 is fixed to zero.
 */
struct Trajectory {
    enum class Origin { simulated, ingested };

    std::vector<double> values;
    std::size_t n = 0;
    int period = 1;
    std::uint64_t seed = 0;
    Origin origin = Origin::simulated;

    Trajectory() = default;

    Trajectory(std::vector<double> xs, std::size_t n_, int period_, std::uint64_t seed_ = 0,
               Origin origin_ = Origin::simulated)
        : values(std::move(xs)), n(n_), period(period_), seed(seed_), origin(origin_) {
        detail::require(n >= 1 && period >= 1, "trajectory needs n >= 1 and T >= 1");
        detail::require(values.size() == n * static_cast<std::size_t>(period),
                        "trajectory length must equal n * T");
    }

    /// Wraps ingested data, dropping the trailing partial period.
    static Trajectory from_series(std::span<const double> xs, int period_) {
        detail::require(period_ >= 1, "period must be positive");
        const std::size_t n_ = xs.size() / static_cast<std::size_t>(period_);
        detail::require(n_ >= 1, "series shorter than one period");
        std::vector<double> kept(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n_ * period_));
        return Trajectory(std::move(kept), n_, period_, 0, Origin::ingested);
    }

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }

    /// X_t for t in [0, nT]; X_0 = 0.
    [[nodiscard]] double x(std::size_t t) const { return t == 0 ? 0.0 : values[t - 1]; }

    [[nodiscard]] double mean_square() const noexcept {
        double acc = 0.0;
        for (double v : values) {
            acc += v * v;
        }
        return values.empty() ? 0.0 : acc / static_cast<double>(values.size());
    }
};

/// Simulates X_t = a_t(t / (nT)) X_{t-1} + xi_t for t = 1..nT from X_0 = 0.
[[nodiscard]] inline Trajectory simulate(const CoefficientFamily& coeffs, const NoiseModel& noise, std::size_t n,
                                         std::uint64_t seed) {
    detail::require(n >= 1, "simulate needs n >= 1");
    const int period = coeffs.period();
    const std::size_t length = n * static_cast<std::size_t>(period);
    const double scale = 1.0 / static_cast<double>(length);

    Engine engine = make_engine(seed);
    auto draw = noise.sampler();
    std::vector<double> xs(length);
    double prev = 0.0;
    for (std::size_t t = 1; t <= length; ++t) {
        const auto s = static_cast<long long>((t - 1) % static_cast<std::size_t>(period)) + 1;
        const double a = coeffs(s, static_cast<double>(t) * scale);
        prev = a * prev + draw(engine);
        xs[t - 1] = prev;
    }
    return Trajectory(std::move(xs), n, period, seed, Trajectory::Origin::simulated);
}

namespace detail {

/// Partial products prod_{j=0}^{i} a_{s-j}(v)^power for i = 0..T-1.
inline std::vector<double> season_products(const CoefficientFamily& coeffs, long long s, double v, int power) {
    const int period = coeffs.period();
    std::vector<double> out(static_cast<std::size_t>(period));
    double acc = 1.0;
    for (int j = 0; j < period; ++j) {
        acc *= std::pow(std::abs(coeffs(s - j, v)), power);
        out[static_cast<std::size_t>(j)] = acc;
    }
    return out;
}

} // namespace detail

/// gamma^(2)_s(v): the local variance of X_t at season s and rescaled time v.
[[nodiscard]] inline double theoretical_gamma2(const CoefficientFamily& coeffs, const NoiseModel& noise, long long s,
                                               double v) {
    const auto beta = detail::season_products(coeffs, s, v, 2);
    double numerator = 1.0;
    for (std::size_t i = 0; i + 1 < beta.size(); ++i) {
        numerator += beta[i];
    }
    return noise.variance() * numerator / (1.0 - beta.back());
}

/**
 * @brief gamma^(4)_s(v): the local fourth moment of X_t.
 *
 * Periodic fixed point of w_t = a_t^4 w_{t-1} + r_t with
 * r_t = mu4 + 6 sigma^2 gamma^(2)_t - 6 sigma^4, where the forcing r keeps its
 * own season along the lags. When every a_s^2 coincides this is the familiar
 * r_s (1 + sum_i delta_{s,i}) / (1 - delta_{s,T-1}).
 *
 * @throws FourthMomentUnavailable when E(xi^4) is infinite.
 */
[[nodiscard]] inline double theoretical_gamma4(const CoefficientFamily& coeffs, const NoiseModel& noise, long long s,
                                               double v) {
    const auto mu4 = noise.fourth_moment();
    if (!mu4) {
        throw FourthMomentUnavailable("fourth moment unavailable: noise " + noise.id() + " has infinite E(xi^4)");
    }
    const double sigma2 = noise.variance();
    auto forcing = [&](long long k) {
        return *mu4 + 6.0 * sigma2 * theoretical_gamma2(coeffs, noise, k, v) - 6.0 * sigma2 * sigma2;
    };
    const auto delta = detail::season_products(coeffs, s, v, 4);
    double numerator = forcing(s);
    for (std::size_t i = 0; i + 1 < delta.size(); ++i) {
        numerator += delta[i] * forcing(s - static_cast<long long>(i) - 1);
    }
    return numerator / (1.0 - delta.back());
}

/// Bound alpha^{2(t - t')} on the lag factor in Cov(X_t^2, X_{t'}^2).
[[nodiscard]] inline double covariance_decay_bound(const CoefficientFamily& coeffs, long long t, long long tprime) {
    detail::require(t > tprime, "covariance_decay_bound needs t > t'");
    return std::pow(coeffs.alpha(), 2.0 * static_cast<double>(t - tprime));
}

/// gamma^(2) and gamma^(4) bound to one model.
struct MomentProfile {
    CoefficientFamily coeffs;
    NoiseModel noise;

    [[nodiscard]] double gamma2(long long s, double v) const { return theoretical_gamma2(coeffs, noise, s, v); }

    /// nullopt when the noise has no fourth moment.
    [[nodiscard]] std::optional<double> gamma4(long long s, double v) const {
        if (!noise.fourth_moment()) {
            return std::nullopt;
        }
        return theoretical_gamma4(coeffs, noise, s, v);
    }
};

} // namespace ptvar
