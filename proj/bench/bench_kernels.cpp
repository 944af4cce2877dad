// Serial vs OpenMP timing for the numeric kernels and the forecast table.
//
//   bench_kernels [length] [repeats]

#include "datesso/kernels.hpp"
#include "datesso/model.hpp"
#include "datesso/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

namespace {

template <typename F>
double best_of(int repeats, F&& f) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        f();
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - t0;
        best = std::min(best, dt.count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-18s serial %10.3f ms  parallel %10.3f ms  speedup %5.2fx  %s\n", name, serial * 1e3,
                parallel * 1e3, serial / parallel, same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    const std::size_t length = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 20000;
    const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
    std::printf("threads: %d, length: %zu, best of %d\n", datesso::kernels::max_threads(), length, repeats);

    std::mt19937_64 rng(7);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> series(length);
    for (auto& v : series) v = noise(rng);
    const auto weights = datesso::kernels::frac_weights(0.3, 1000);

    std::vector<double> a, b;
    const double fd_s = best_of(repeats, [&] { a = datesso::kernels::frac_diff_serial(series, weights); });
    const double fd_p = best_of(repeats, [&] { b = datesso::kernels::frac_diff_parallel(series, weights); });
    report("frac_diff", fd_s, fd_p, a == b);

    const std::size_t freqs = std::max<std::size_t>(1, static_cast<std::size_t>(std::sqrt(static_cast<double>(length))));
    const double pg_s = best_of(repeats, [&] { a = datesso::kernels::periodogram_serial(series, freqs * 8); });
    const double pg_p = best_of(repeats, [&] { b = datesso::kernels::periodogram_parallel(series, freqs * 8); });
    report("periodogram", pg_s, pg_p, a == b);

    const auto trace = datesso::generate_synthetic_trace(3, 3600, 8);
    datesso::SimulationConfig config;
    datesso::ForecastTable ts, tp;
    const double ft_s = best_of(1, [&] { ts = datesso::build_forecast_table_serial(trace, config); });
    const double ft_p = best_of(1, [&] { tp = datesso::build_forecast_table(trace, config); });
    report("forecast_table", ft_s, ft_p, ts == tp);
    return 0;
}
