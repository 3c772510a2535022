#pragma once

#include "ptvar/error.hpp"
#include "ptvar/rng.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace ptvar {

/// Autocovariance of unit fractional Gaussian noise at integer lag k.
[[nodiscard]] inline double fgn_autocovariance(double hurst, double k) {
    const double h2 = 2.0 * hurst;
    return 0.5 * (std::pow(std::abs(k + 1.0), h2) - 2.0 * std::pow(std::abs(k), h2) + std::pow(std::abs(k - 1.0), h2));
}

struct FbmPath {
    std::vector<double> values;        ///< B_H(k / grid_size), k = 0..grid_size
    bool used_cholesky_fallback = false;
};

/// Largest grid for which the dense Cholesky fallback is attempted.
inline constexpr std::size_t cholesky_fallback_limit = 4096;

/**
 * @brief Fractional Brownian motion on [0,1] by circulant embedding.
 *
 * The fGn autocovariance of the grid_size increments is embedded in a
 * circulant matrix of order 2 * grid_size; its FFT gives the eigenvalues and
 * the real part of F diag(sqrt(lambda / M)) Z is an exact fGn sample. Negative
 * eigenvalues switch to a Cholesky factorization of the Toeplitz covariance.
 */
[[nodiscard]] inline FbmPath fbm_path(double hurst, std::size_t grid_size, std::uint64_t seed) {
    if (!(hurst > 0.0 && hurst < 1.0)) {
        detail::fail("Hurst exponent must lie in (0,1)");
    }
    detail::require(grid_size >= 2, "fBm grid needs at least 2 increments");
    detail::require((grid_size & (grid_size - 1)) == 0, "fBm grid size must be a power of two");

    const std::size_t m = 2 * grid_size;
    std::vector<double> row(m);
    for (std::size_t k = 0; k <= grid_size; ++k) {
        row[k] = fgn_autocovariance(hurst, static_cast<double>(k));
    }
    for (std::size_t k = grid_size + 1; k < m; ++k) {
        row[k] = row[m - k];
    }

    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> spectrum;
    fft.fwd(spectrum, row);

    double largest = 0.0;
    double smallest = 0.0;
    for (const auto& z : spectrum) {
        largest = std::max(largest, z.real());
        smallest = std::min(smallest, z.real());
    }

    Engine engine = make_engine(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> increments(grid_size);
    FbmPath out;

    if (smallest >= -1e-10 * largest) {
        std::vector<std::complex<double>> weighted(m);
        for (std::size_t k = 0; k < m; ++k) {
            const double scale = std::sqrt(std::max(spectrum[k].real(), 0.0) / static_cast<double>(m));
            const double re = normal(engine);
            const double im = normal(engine);
            weighted[k] = scale * std::complex<double>(re, im);
        }
        std::vector<std::complex<double>> mixed;
        fft.fwd(mixed, weighted);
        for (std::size_t k = 0; k < grid_size; ++k) {
            increments[k] = mixed[k].real();
        }
    } else {
        if (grid_size > cholesky_fallback_limit) {
            throw Error(ErrorCategory::numerical, "circulant embedding failed and grid is too large for Cholesky");
        }
        const auto g = static_cast<Eigen::Index>(grid_size);
        Eigen::MatrixXd cov(g, g);
        for (Eigen::Index i = 0; i < g; ++i) {
            for (Eigen::Index j = 0; j < g; ++j) {
                cov(i, j) = row[static_cast<std::size_t>(std::abs(i - j))];
            }
        }
        const Eigen::LLT<Eigen::MatrixXd> llt(cov);
        if (llt.info() != Eigen::Success) {
            throw Error(ErrorCategory::numerical, "fGn covariance is not positive definite");
        }
        Eigen::VectorXd z(g);
        for (Eigen::Index i = 0; i < g; ++i) {
            z(i) = normal(engine);
        }
        const Eigen::VectorXd x = llt.matrixL() * z;
        for (Eigen::Index i = 0; i < g; ++i) {
            increments[static_cast<std::size_t>(i)] = x(i);
        }
        out.used_cholesky_fallback = true;
    }

    const double step = std::pow(static_cast<double>(grid_size), -hurst);
    out.values.resize(grid_size + 1);
    out.values[0] = 0.0;
    for (std::size_t k = 0; k < grid_size; ++k) {
        out.values[k + 1] = out.values[k] + step * increments[k];
    }
    return out;
}

} // namespace ptvar
