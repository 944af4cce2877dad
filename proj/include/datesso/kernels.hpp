#pragma once

// Data-parallel numeric kernels. Each kernel has a serial reference and an
// OpenMP version; both produce bit-identical output because every output
// element is computed by the same loop in the same order. Tests compare them
// and bench/ times them.

#include <cstddef>
#include <span>
#include <vector>

namespace datesso::kernels {

/// Binomial weights of (1 - B)^d: w_0 = 1, w_k = w_{k-1} (k - 1 - d) / k.
std::vector<double> frac_weights(double d, std::size_t count);

/// y_t = sum_{k=0}^{min(t, K-1)} w_k x_{t-k}, zero pre-sample.
std::vector<double> frac_diff_serial(std::span<const double> series,
                                     std::span<const double> weights);
std::vector<double> frac_diff_parallel(std::span<const double> series,
                                       std::span<const double> weights);

/// I(lambda_j) = |sum_t x_t exp(-i lambda_j t)|^2 / (2 pi n) for
/// lambda_j = 2 pi j / n, j = 1..frequencies.
std::vector<double> periodogram_serial(std::span<const double> series, std::size_t frequencies);
std::vector<double> periodogram_parallel(std::span<const double> series, std::size_t frequencies);

/// Series shorter than this go through the serial path.
inline constexpr std::size_t kParallelThreshold = 2048;

inline std::vector<double> frac_diff(std::span<const double> series,
                                     std::span<const double> weights) {
    return series.size() < kParallelThreshold ? frac_diff_serial(series, weights)
                                              : frac_diff_parallel(series, weights);
}

inline std::vector<double> periodogram(std::span<const double> series, std::size_t frequencies) {
    return series.size() < kParallelThreshold ? periodogram_serial(series, frequencies)
                                              : periodogram_parallel(series, frequencies);
}

int max_threads();

}  // namespace datesso::kernels
