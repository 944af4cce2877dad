#include "datesso/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace datesso::kernels {

std::vector<double> frac_weights(double d, std::size_t count) {
    std::vector<double> w(count);
    if (count == 0) return w;
    w[0] = 1.0;
    for (std::size_t k = 1; k < count; ++k) {
        const double kd = static_cast<double>(k);
        w[k] = w[k - 1] * (kd - 1.0 - d) / kd;
    }
    return w;
}

namespace {

inline double frac_diff_at(std::span<const double> x, std::span<const double> w, std::size_t t) {
    const std::size_t lags = std::min(t + 1, w.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < lags; ++k) acc += w[k] * x[t - k];
    return acc;
}

inline double periodogram_at(std::span<const double> x, std::size_t j) {
    const double n = static_cast<double>(x.size());
    const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j) / n;
    double re = 0.0;
    double im = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        const double angle = lambda * static_cast<double>(t);
        re += x[t] * std::cos(angle);
        im -= x[t] * std::sin(angle);
    }
    return (re * re + im * im) / (2.0 * std::numbers::pi * n);
}

}  // namespace

std::vector<double> frac_diff_serial(std::span<const double> series,
                                     std::span<const double> weights) {
    std::vector<double> out(series.size());
    for (std::size_t t = 0; t < series.size(); ++t) out[t] = frac_diff_at(series, weights, t);
    return out;
}

std::vector<double> frac_diff_parallel(std::span<const double> series,
                                       std::span<const double> weights) {
    std::vector<double> out(series.size());
    const auto n = static_cast<std::ptrdiff_t>(series.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t t = 0; t < n; ++t) {
        out[static_cast<std::size_t>(t)] =
            frac_diff_at(series, weights, static_cast<std::size_t>(t));
    }
    return out;
}

std::vector<double> periodogram_serial(std::span<const double> series, std::size_t frequencies) {
    std::vector<double> out(frequencies);
    for (std::size_t j = 1; j <= frequencies; ++j) out[j - 1] = periodogram_at(series, j);
    return out;
}

std::vector<double> periodogram_parallel(std::span<const double> series,
                                         std::size_t frequencies) {
    std::vector<double> out(frequencies);
    const auto m = static_cast<std::ptrdiff_t>(frequencies);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 1; j <= m; ++j) {
        out[static_cast<std::size_t>(j - 1)] = periodogram_at(series, static_cast<std::size_t>(j));
    }
    return out;
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace datesso::kernels
