#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ptvar {

/// Machine-readable failure categories; the CLI maps them to exit codes.
enum class ErrorCategory {
    invalid_argument = 2,
    contractivity = 3,
    degenerate_denominator = 4,
    fourth_moment_unavailable = 5,
    derivative_unavailable = 6,
    parse_error = 7,
    io_error = 8,
    numerical = 9,
};

[[nodiscard]] inline std::string_view category_name(ErrorCategory c) noexcept {
    switch (c) {
    case ErrorCategory::invalid_argument: return "invalid_argument";
    case ErrorCategory::contractivity: return "contractivity";
    case ErrorCategory::degenerate_denominator: return "degenerate_denominator";
    case ErrorCategory::fourth_moment_unavailable: return "fourth_moment_unavailable";
    case ErrorCategory::derivative_unavailable: return "derivative_unavailable";
    case ErrorCategory::parse_error: return "parse_error";
    case ErrorCategory::io_error: return "io_error";
    case ErrorCategory::numerical: return "numerical";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& what)
        : std::runtime_error(what), category_(category) {}

    [[nodiscard]] ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

class DegenerateDenominator : public Error {
public:
    explicit DegenerateDenominator(const std::string& what)
        : Error(ErrorCategory::degenerate_denominator, what) {}
};

class FourthMomentUnavailable : public Error {
public:
    explicit FourthMomentUnavailable(const std::string& what)
        : Error(ErrorCategory::fourth_moment_unavailable, what) {}
};

class DerivativeUnavailable : public Error {
public:
    explicit DerivativeUnavailable(const std::string& what)
        : Error(ErrorCategory::derivative_unavailable, what) {}
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(ErrorCategory::parse_error, what), line_(line) {}

    /// 1-based line number in the input file, 0 when not tied to a line.
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

namespace detail {

[[noreturn]] inline void fail(const std::string& what) {
    throw Error(ErrorCategory::invalid_argument, what);
}

inline void require(bool condition, const std::string& what) {
    if (!condition) {
        fail(what);
    }
}

} // namespace detail
} // namespace ptvar
