#include "datesso/kernels.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace datesso::kernels;

namespace {

std::vector<double> random_series(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> x(n);
    for (auto& v : x) v = z(rng);
    return x;
}

}  // namespace

TEST(FracWeights, ClosedForms) {
    const auto zero = frac_weights(0.0, 5);
    EXPECT_EQ(zero, (std::vector<double>{1, 0, 0, 0, 0}));
    const auto one = frac_weights(1.0, 4);
    EXPECT_EQ(one, (std::vector<double>{1, -1, 0, 0}));
    const double d = 0.3;
    const auto w = frac_weights(d, 4);
    EXPECT_DOUBLE_EQ(w[1], -d);
    EXPECT_NEAR(w[2], d * (d - 1.0) / 2.0, 1e-15);
    EXPECT_NEAR(w[3], -d * (d - 1.0) * (d - 2.0) / 6.0, 1e-15);
}

TEST(FracDiff, MatchesDirectConvolution) {
    std::mt19937_64 rng(1);
    const auto x = random_series(rng, 300);
    const auto w = frac_weights(0.35, 50);
    const auto y = frac_diff_serial(x, w);
    for (std::size_t t = 0; t < x.size(); ++t) {
        double acc = 0.0;
        for (std::size_t k = 0; k < w.size() && k <= t; ++k) acc += w[k] * x[t - k];
        EXPECT_NEAR(y[t], acc, 1e-12);
    }
}

TEST(FracDiff, SerialAndParallelAreIdentical) {
    std::mt19937_64 rng(2);
    for (std::size_t n : {1u, 17u, 2047u, 2048u, 5000u}) {
        const auto x = random_series(rng, n);
        const auto w = frac_weights(-0.2, 1000);
        EXPECT_EQ(frac_diff_serial(x, w), frac_diff_parallel(x, w)) << n;
        EXPECT_EQ(frac_diff(x, w), frac_diff_serial(x, w));
    }
}

TEST(Periodogram, MatchesComplexDft) {
    std::mt19937_64 rng(3);
    const auto x = random_series(rng, 128);
    const auto got = periodogram_serial(x, 11);
    ASSERT_EQ(got.size(), 11u);
    const double n = static_cast<double>(x.size());
    for (std::size_t j = 1; j <= 11; ++j) {
        std::complex<double> acc = 0.0;
        const double lambda = 2.0 * std::numbers::pi * static_cast<double>(j) / n;
        for (std::size_t t = 0; t < x.size(); ++t) acc += x[t] * std::polar(1.0, -lambda * static_cast<double>(t));
        EXPECT_NEAR(got[j - 1], std::norm(acc) / (2.0 * std::numbers::pi * n), 1e-10);
    }
}

TEST(Periodogram, SerialAndParallelAreIdentical) {
    std::mt19937_64 rng(4);
    for (std::size_t n : {64u, 3000u}) {
        const auto x = random_series(rng, n);
        const auto f = static_cast<std::size_t>(std::sqrt(static_cast<double>(n)));
        EXPECT_EQ(periodogram_serial(x, f), periodogram_parallel(x, f));
    }
}

TEST(Kernels, ReportThreads) {
    EXPECT_GE(max_threads(), 1);
}
