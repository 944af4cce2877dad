#pragma once

// Comparative statistics for strategy runs.

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace datesso {

/// Raised when a statistic is undefined for its inputs.
class StatisticsError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t kMinKruskalSample = 3;

struct KruskalWallis {
    double h = 0.0;
    double p_value = 1.0;
    std::size_t n_total = 0;
    std::size_t groups = 0;
};

/// H with tie correction, p from chi-squared with k-1 degrees of freedom.
/// Needs >= 2 samples with >= kMinKruskalSample values each. All values
/// tied gives H = 0, p = 1.
KruskalWallis kruskal_wallis(const std::vector<std::vector<double>>& samples);

/// max(0, (H - k + 1) / (n - k)). Throws StatisticsError unless n > k.
double eta_squared(double h, std::size_t n_total, std::size_t k_groups);

/// "negligible" below 0.01, then "small", "medium" (>= 0.06), "large" (>= 0.14).
std::string_view effect_label(double eta2);

struct SustainabilityInput {
    double s_total = 0.0;
    std::size_t violations = 0;
};

/// (1/V) ((S - S_min) / (S_max - S_min) + 1) per entry; nullopt where V = 0.
/// Throws StatisticsError("degenerate comparison") when every S is equal or
/// fewer than two entries are given.
std::vector<std::optional<double>> sustainability_scores(std::span<const SustainabilityInput> inputs);

/// 0 for an empty input (a strategy that never reasoned).
double median(std::vector<double> values);

}  // namespace datesso
