#include "datesso/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace datesso {

KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& samples) {
    if (samples.size() < 2) throw StatisticsError("kruskal_wallis: need at least two samples");
    struct Obs {
        double value;
        std::size_t group;
    };
    std::vector<Obs> pooled;
    for (std::size_t g = 0; g < samples.size(); ++g) {
        if (samples[g].size() < kMinKruskalSample) {
            throw StatisticsError("kruskal_wallis: sample " + std::to_string(g) + " has fewer than " +
                                  std::to_string(kMinKruskalSample) + " observations");
        }
        for (double v : samples[g]) {
            if (!std::isfinite(v)) throw StatisticsError("kruskal_wallis: non-finite observation");
            pooled.push_back({v, g});
        }
    }
    std::sort(pooled.begin(), pooled.end(), [](const Obs& a, const Obs& b) { return a.value < b.value; });

    const auto n = static_cast<double>(pooled.size());
    std::vector<double> rank_sum(samples.size(), 0.0);
    double tie_term = 0.0;
    for (std::size_t i = 0; i < pooled.size();) {
        std::size_t j = i;
        while (j < pooled.size() && pooled[j].value == pooled[i].value) ++j;
        const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1 .. j
        for (std::size_t r = i; r < j; ++r) rank_sum[pooled[r].group] += mid_rank;
        const auto t = static_cast<double>(j - i);
        tie_term += t * t * t - t;
        i = j;
    }

    KruskalWallis out;
    out.n_total = pooled.size();
    out.groups = samples.size();
    const double correction = 1.0 - tie_term / (n * n * n - n);
    if (correction <= 0.0) return out;  // every value tied

    double h = 0.0;
    for (std::size_t g = 0; g < samples.size(); ++g) {
        h += rank_sum[g] * rank_sum[g] / static_cast<double>(samples[g].size());
    }
    h = (12.0 / (n * (n + 1.0)) * h - 3.0 * (n + 1.0)) / correction;
    out.h = std::max(0.0, h);
    boost::math::chi_squared dist(static_cast<double>(samples.size() - 1));
    out.p_value = boost::math::cdf(boost::math::complement(dist, out.h));
    return out;
}

double eta_squared(double h, std::size_t n_total, std::size_t k_groups) {
    if (n_total <= k_groups) throw StatisticsError("eta_squared: need n_total > k_groups");
    const double value = (h - static_cast<double>(k_groups) + 1.0) /
                         static_cast<double>(n_total - k_groups);
    return std::max(0.0, value);
}

std::string_view effect_label(double eta2) {
    if (eta2 >= 0.14) return "large";
    if (eta2 >= 0.06) return "medium";
    if (eta2 >= 0.01) return "small";
    return "negligible";
}

std::vector<std::optional<double>> sustainability_scores(std::span<const SustainabilityInput> inputs) {
    if (inputs.size() < 2) throw StatisticsError("degenerate comparison: fewer than two strategies");
    const auto [lo, hi] = std::minmax_element(inputs.begin(), inputs.end(),
                                              [](const auto& a, const auto& b) { return a.s_total < b.s_total; });
    const double s_min = lo->s_total;
    const double s_max = hi->s_total;
    if (s_max == s_min) throw StatisticsError("degenerate comparison");

    std::vector<std::optional<double>> scores;
    scores.reserve(inputs.size());
    for (const auto& in : inputs) {
        if (in.violations == 0) {
            scores.emplace_back(std::nullopt);
            continue;
        }
        const double normalized = (in.s_total - s_min) / (s_max - s_min);
        scores.emplace_back((normalized + 1.0) / static_cast<double>(in.violations));
    }
    return scores;
}

double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

}  // namespace datesso
