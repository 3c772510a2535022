#pragma once

#include "ptvar/error.hpp"
#include "ptvar/estimator.hpp"
#include "ptvar/kernels.hpp"
#include "ptvar/process.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace ptvar {

/// Shortest text that reads back bit-identically (17 significant digits).
[[nodiscard]] inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

/// Writes `t,x` rows, one per observation, LF line endings.
inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << "t,x\n";
    for (std::size_t t = 1; t <= traj.size(); ++t) {
        out << t << ',' << format_double(traj.x(t)) << '\n';
    }
}

/// Which columns carry time and value; by header name, or by index when the name is empty.
struct ColumnMapping {
    std::string time = "t";
    std::string value = "x";
    std::size_t time_index = 0;
    std::size_t value_index = 1;
};

struct SeriesFile {
    std::string path;
    ColumnMapping mapping;
    std::vector<double> times;
    std::vector<double> values;
    std::vector<std::size_t> dropped_lines;   ///< rows with an empty or non-finite value
    std::optional<int> frequency;             ///< e.g. 12 for monthly data

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) {
            return fields;
        }
        start = pos + 1;
    }
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

/// Full-field parse; nullopt when the field is not a number.
inline std::optional<double> parse_number(std::string_view s) {
    if (!s.empty() && s.front() == '+') {
        s.remove_prefix(1);
    }
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return v;
}

inline std::size_t column_index(const std::vector<std::string_view>& header, const std::string& name,
                                std::size_t fallback) {
    if (name.empty()) {
        return fallback;
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) {
            return i;
        }
    }
    throw ParseError("column '" + name + "' not found in header", 1);
}

} // namespace detail

/**
 * @brief Parses a comma-separated series with a header row.
 *
 * Rows whose value field is empty or non-finite are dropped and their line
 * numbers recorded. Malformed numbers, missing columns, and non-increasing
 * times are errors carrying the offending line.
 */
[[nodiscard]] inline SeriesFile parse_series(std::istream& in, const ColumnMapping& mapping = {},
                                             std::string path = "<stream>") {
    SeriesFile out;
    out.path = std::move(path);
    out.mapping = mapping;
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw ParseError("empty series", 0);
    }
    ++line_no;
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF) {
        line.erase(0, 3);   // UTF-8 BOM
    }
    const auto header = detail::split_commas(detail::trim(line));
    const std::size_t ti = detail::column_index(header, mapping.time, mapping.time_index);
    const std::size_t vi = detail::column_index(header, mapping.value, mapping.value_index);

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = detail::trim(line);
        if (body.empty()) {
            continue;
        }
        const auto fields = detail::split_commas(body);
        if (ti >= fields.size()) {
            throw ParseError("line " + std::to_string(line_no) + ": missing time column", line_no);
        }
        const auto tf = detail::trim(fields[ti]);
        const auto t = detail::parse_number(tf);
        if (!t || !std::isfinite(*t)) {
            throw ParseError("line " + std::to_string(line_no) + ": malformed time '" + std::string(tf) + "'",
                             line_no);
        }
        const auto vf = vi < fields.size() ? detail::trim(fields[vi]) : std::string_view{};
        if (vf.empty()) {
            out.dropped_lines.push_back(line_no);
            continue;
        }
        const auto v = detail::parse_number(vf);
        if (!v) {
            throw ParseError("line " + std::to_string(line_no) + ": malformed value '" + std::string(vf) + "'",
                             line_no);
        }
        if (!std::isfinite(*v)) {
            out.dropped_lines.push_back(line_no);
            continue;
        }
        if (!out.times.empty()) {
            if (*t == out.times.back()) {
                throw ParseError("line " + std::to_string(line_no) + ": duplicate timestamp", line_no);
            }
            if (*t < out.times.back()) {
                throw ParseError("line " + std::to_string(line_no) + ": time index not increasing", line_no);
            }
        }
        out.times.push_back(*t);
        out.values.push_back(*v);
    }
    if (out.values.empty()) {
        throw ParseError("empty series", line_no);
    }
    if (out.values.size() < 2) {
        throw ParseError("series needs at least 2 rows", line_no);
    }
    return out;
}

[[nodiscard]] inline SeriesFile ingest_csv(const std::string& path, const ColumnMapping& mapping = {}) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCategory::io_error, "cannot open '" + path + "'");
    }
    return parse_series(in, mapping, path);
}

struct Decomposition {
    std::vector<double> trend;
    std::vector<double> seasonal;   ///< sums to zero over one period
    std::vector<double> residual;
    std::size_t interior_begin = 0; ///< first index with a full centered window
    std::size_t interior_end = 0;   ///< one past the last such index
};

/**
 * @brief Additive trend + seasonal removal.
 *
 * The trend is a centered moving average spanning `trend_window` points (odd;
 * default 2 * period + 1) with half weight on the two end points, so a span of
 * 2 * period + 1 cancels any period-`period` pattern. Near the series ends the
 * window is truncated and equally weighted. The seasonal component is the
 * per-phase mean of the detrended series over the interior, re-centered to sum
 * to zero with its level moved into the trend.
 */
[[nodiscard]] inline Decomposition deseasonalize(std::span<const double> values, int period,
                                                 std::optional<int> trend_window = std::nullopt) {
    detail::require(period > 0, "period must be positive");
    const std::size_t length = values.size();
    detail::require(length >= 3 * static_cast<std::size_t>(period), "series must span at least three periods");
    const int window = trend_window.value_or(2 * period + 1);
    detail::require(window >= 1 && window % 2 == 1, "trend window must be a positive odd integer");
    const auto half = static_cast<std::size_t>(window / 2);
    detail::require(2 * half < length, "trend window longer than the series");

    Decomposition d;
    d.trend.resize(length);
    std::vector<double> prefix(length + 1, 0.0);
    for (std::size_t i = 0; i < length; ++i) {
        prefix[i + 1] = prefix[i] + values[i];
    }
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t lo = i >= half ? i - half : 0;
        const std::size_t hi = std::min(length - 1, i + half);
        const double sum = prefix[hi + 1] - prefix[lo];
        if (half > 0 && hi - lo == 2 * half) {
            // full window: half weight on both end points
            d.trend[i] = (sum - 0.5 * (values[lo] + values[hi])) / static_cast<double>(2 * half);
        } else {
            d.trend[i] = sum / static_cast<double>(hi - lo + 1);
        }
    }
    d.interior_begin = half;
    d.interior_end = length - half;

    const auto p = static_cast<std::size_t>(period);
    std::vector<double> phase_sum(p, 0.0);
    std::vector<std::size_t> phase_count(p, 0);
    for (std::size_t i = d.interior_begin; i < d.interior_end; ++i) {
        phase_sum[i % p] += values[i] - d.trend[i];
        ++phase_count[i % p];
    }
    std::vector<double> phase_mean(p, 0.0);
    double level = 0.0;
    for (std::size_t k = 0; k < p; ++k) {
        detail::require(phase_count[k] > 0, "interior too short to cover every phase");
        phase_mean[k] = phase_sum[k] / static_cast<double>(phase_count[k]);
        level += phase_mean[k];
    }
    level /= static_cast<double>(p);

    d.seasonal.resize(length);
    d.residual.resize(length);
    for (std::size_t i = 0; i < length; ++i) {
        d.trend[i] += level;
        d.seasonal[i] = phase_mean[i % p] - level;
        d.residual[i] = values[i] - d.trend[i] - d.seasonal[i];
    }
    return d;
}

struct ProfileRow {
    int season = 1;
    double u = 0.0;
    bool valid = false;
    double a_hat = 0.0;
    double std_error = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

/// Real-data bandwidth default n^{-1/5}.
[[nodiscard]] inline double default_real_bandwidth(std::size_t n) {
    return std::pow(static_cast<double>(n), -0.2);
}

/**
 * @brief Per-season coefficient profile a_hat_s(u), s = 1..T, at each u.
 *
 * `series` should already be deseasonalized. Rows are season-major.
 */
[[nodiscard]] inline std::vector<ProfileRow> analyze(std::span<const double> series, int period,
                                                     std::span<const double> u_list, const Kernel& kernel,
                                                     std::optional<double> bandwidth = std::nullopt,
                                                     double level = 0.95) {
    const auto traj = Trajectory::from_series(series, period);
    const double b = bandwidth.value_or(default_real_bandwidth(traj.n));
    const auto grid = asymptotic_ci(estimate_grid(traj, u_list, b, kernel), level);
    std::vector<ProfileRow> rows;
    for (int s = 1; s <= period; ++s) {
        for (std::size_t i = 0; i < u_list.size(); ++i) {
            const auto& c = grid.cell(s, i);
            rows.push_back(ProfileRow{s, u_list[i], c.valid && !std::isnan(c.std_error), c.a_hat, c.std_error,
                                      c.ci_lo, c.ci_hi});
        }
    }
    return rows;
}

} // namespace ptvar
