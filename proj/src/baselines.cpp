#include "datesso/baselines.hpp"

#include "datesso/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace datesso {

std::string_view strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::Datesso: return "datesso";
        case StrategyKind::Tlhca: return "tlhca";
        case StrategyKind::Doa: return "doa";
        case StrategyKind::Rbc: return "rbc";
    }
    return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    for (auto kind : {StrategyKind::Datesso, StrategyKind::Tlhca, StrategyKind::Doa, StrategyKind::Rbc}) {
        if (lower == strategy_name(kind)) return kind;
    }
    throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

// =============================================================================
// TLHCA / DOA
// =============================================================================

namespace {

bool violates_global_on_window(const ReasonerContext& ctx, const CompositionPlan& plan,
                               const ForecastWindow& window, std::size_t steps) {
    for (std::size_t k = 0; k < steps; ++k) {
        const auto g = global_observe(ctx.repo, plan, window.row(k), ctx.sla);
        if (g.latency_violated || g.utilization_violated) return true;
    }
    return false;
}

}  // namespace

AdaptationDecision tlhca_reason(const ReasonerContext& ctx, const CompositionPlan& plan,
                                std::size_t n, std::span<const Workload> w_now,
                                const ForecastWindow& window) {
    const auto infeasible = identify_infeasible(ctx.repo, plan, w_now, ctx.sla);
    auto first = search(ctx, plan, n, w_now, window, infeasible);
    if (!violates_global_on_window(ctx, first.new_plan, window, first.horizon_used - n)) return first;

    if (infeasible.size() < plan.size()) {
        std::vector<std::size_t> all(plan.size());
        std::iota(all.begin(), all.end(), std::size_t{0});
        auto rerun = search(ctx, plan, n, w_now, window, all);
        rerun.evaluation_count += first.evaluation_count;
        rerun.global_violation =
            violates_global_on_window(ctx, rerun.new_plan, window, rerun.horizon_used - n);
        return rerun;
    }
    first.global_violation = true;
    return first;
}

AdaptationDecision doa_reason(const ReasonerContext& ctx, const CompositionPlan& plan,
                              std::size_t n, std::span<const Workload> w_now,
                              const ForecastWindow& window) {
    ReasonerContext oblivious{ctx.repo, ctx.sla, ctx.cost, Objective::DebtOblivious};
    return reason(oblivious, plan, n, w_now, window);
}

// =============================================================================
// Regions
// =============================================================================

namespace {

double distance2(const QosPoint& a, double u, double l) {
    const double du = a.utilization - u;
    const double dl = a.latency - l;
    return du * du + dl * dl;
}

}  // namespace

std::vector<Region> cluster_regions(std::span<const QosPoint> points, std::size_t k,
                                    std::uint64_t seed) {
    if (points.empty()) return {};
    k = std::clamp<std::size_t>(k, 1, points.size());

    // k-means++ seeding.
    std::mt19937_64 rng(seed);
    std::vector<QosPoint> centroids;
    centroids.push_back(points[std::uniform_int_distribution<std::size_t>(0, points.size() - 1)(rng)]);
    std::vector<double> nearest(points.size());
    while (centroids.size() < k) {
        double total = 0.0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& c : centroids) best = std::min(best, distance2(points[i], c.utilization, c.latency));
            nearest[i] = best;
            total += best;
        }
        if (total == 0.0) {
            centroids.push_back(centroids.front());
            continue;
        }
        double target = std::uniform_real_distribution<double>(0.0, total)(rng);
        std::size_t pick = points.size() - 1;
        for (std::size_t i = 0; i < points.size(); ++i) {
            target -= nearest[i];
            if (target < 0.0) {
                pick = i;
                break;
            }
        }
        centroids.push_back(points[pick]);
    }

    std::vector<std::size_t> assignment(points.size(), 0);
    for (int iteration = 0; iteration < 50; ++iteration) {
        bool changed = iteration == 0;
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::size_t best = 0;
            double best_d = distance2(points[i], centroids[0].utilization, centroids[0].latency);
            for (std::size_t c = 1; c < centroids.size(); ++c) {
                const double d = distance2(points[i], centroids[c].utilization, centroids[c].latency);
                if (d < best_d) {
                    best = c;
                    best_d = d;
                }
            }
            if (assignment[i] != best) changed = true;
            assignment[i] = best;
        }
        if (!changed) break;
        std::vector<QosPoint> sums(centroids.size());
        std::vector<std::size_t> counts(centroids.size(), 0);
        for (std::size_t i = 0; i < points.size(); ++i) {
            sums[assignment[i]].utilization += points[i].utilization;
            sums[assignment[i]].latency += points[i].latency;
            ++counts[assignment[i]];
        }
        for (std::size_t c = 0; c < centroids.size(); ++c) {
            if (counts[c] == 0) continue;
            centroids[c] = {sums[c].utilization / static_cast<double>(counts[c]),
                            sums[c].latency / static_cast<double>(counts[c])};
        }
    }

    std::vector<Region> regions(centroids.size());
    for (std::size_t c = 0; c < centroids.size(); ++c) {
        regions[c].centroid_utilization = centroids[c].utilization;
        regions[c].centroid_latency = centroids[c].latency;
    }
    for (std::size_t i = 0; i < points.size(); ++i) regions[assignment[i]].members.push_back(i);
    std::erase_if(regions, [](const Region& r) { return r.members.empty(); });
    std::stable_sort(regions.begin(), regions.end(), [](const Region& a, const Region& b) {
        if (a.centroid_utilization != b.centroid_utilization) {
            return a.centroid_utilization > b.centroid_utilization;
        }
        if (a.centroid_latency != b.centroid_latency) return a.centroid_latency < b.centroid_latency;
        return a.members.front() < b.members.front();
    });
    return regions;
}

std::vector<QosPoint> candidate_history(const ServiceRepository& repo, std::size_t x,
                                        std::span<const Workload> history,
                                        const SlaConstraints& sla) {
    const auto candidates = repo.candidates(x);
    std::vector<QosPoint> points(candidates.size());
    if (history.empty()) return points;
    for (std::size_t y = 0; y < candidates.size(); ++y) {
        double u = 0.0;
        double l = 0.0;
        for (Workload w : history) {
            u += local_utilization(candidates[y], w, sla);
            l += local_latency(candidates[y], w, sla).norm;
        }
        points[y] = {u / static_cast<double>(history.size()), l / static_cast<double>(history.size())};
    }
    return points;
}

AdaptationDecision rbc_reason(const ServiceRepository& repo, const SlaConstraints& sla,
                              const CompositionPlan& plan, const WorkloadTrace& trace,
                              std::size_t n, const RbcOptions& options) {
    validate_plan(repo, plan);
    AdaptationDecision decision;
    decision.new_plan = plan;
    decision.horizon_used = n;

    std::vector<Workload> history(n + 1);
    for (std::size_t x = 0; x < plan.size(); ++x) {
        for (std::size_t t = 0; t <= n; ++t) history[t] = trace.at(t, x);
        const Workload w_now = history[n];
        const auto points = candidate_history(repo, x, history, sla);
        const auto regions = cluster_regions(points, options.regions, options.seed + x);
        const auto rank = [&](std::size_t y) { return points[y].utilization - points[y].latency; };

        std::optional<std::size_t> pick;
        for (const auto& region : regions) {
            for (std::size_t y : region.members) {
                ++decision.evaluation_count;
                if (!is_feasible(repo.at(x, y), w_now, sla)) continue;
                if (!pick || rank(y) > rank(*pick) || (rank(y) == rank(*pick) && y < *pick)) pick = y;
            }
            if (pick) break;
        }
        if (!pick) {
            decision.fallback = true;
            std::size_t best = plan.selection[x];
            double best_v = violation_magnitude(repo.at(x, best), w_now, sla);
            for (std::size_t y = 0; y < repo.candidates(x).size(); ++y) {
                const double v = violation_magnitude(repo.at(x, y), w_now, sla);
                if (v < best_v) {
                    best = y;
                    best_v = v;
                }
            }
            pick = best;
        }
        if (*pick != plan.selection[x]) {
            decision.replaced.push_back(x);
            decision.scores.push_back(rank(*pick));
            decision.new_plan.selection[x] = *pick;
        }
    }
    return decision;
}

// =============================================================================
// Strategies
// =============================================================================

namespace {

ReasonerContext context_for(const StepContext& step, Objective objective) {
    return ReasonerContext{step.repo, step.sla, step.cost, objective};
}

const ForecastWindow& window_of(const StepContext& step) {
    if (!step.window) throw std::logic_error("strategy requires a forecast window");
    return *step.window;
}

class DatessoStrategy final : public Strategy {
public:
    StrategyKind kind() const override { return StrategyKind::Datesso; }
    bool triggered(const StepContext& step) const override { return step.local_violation; }
    AdaptationDecision decide(const StepContext& step) const override {
        return reason(context_for(step, Objective::DebtAware), step.plan, step.n, step.w_now,
                      window_of(step));
    }
};

class TlhcaStrategy final : public Strategy {
public:
    StrategyKind kind() const override { return StrategyKind::Tlhca; }
    bool triggered(const StepContext& step) const override {
        return step.local_violation || step.global_violation;
    }
    AdaptationDecision decide(const StepContext& step) const override {
        return tlhca_reason(context_for(step, Objective::DebtAware), step.plan, step.n, step.w_now,
                            window_of(step));
    }
};

class DoaStrategy final : public Strategy {
public:
    StrategyKind kind() const override { return StrategyKind::Doa; }
    bool triggered(const StepContext& step) const override { return step.local_violation; }
    AdaptationDecision decide(const StepContext& step) const override {
        return doa_reason(context_for(step, Objective::DebtAware), step.plan, step.n, step.w_now,
                          window_of(step));
    }
};

class RbcStrategy final : public Strategy {
public:
    explicit RbcStrategy(RbcOptions options) : options_(options) {}
    StrategyKind kind() const override { return StrategyKind::Rbc; }
    bool uses_forecasts() const override { return false; }
    bool triggered(const StepContext& step) const override { return step.global_violation; }
    AdaptationDecision decide(const StepContext& step) const override {
        return rbc_reason(step.repo, step.sla, step.plan, step.trace, step.n, options_);
    }

private:
    RbcOptions options_;
};

}  // namespace

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const RbcOptions& rbc) {
    switch (kind) {
        case StrategyKind::Datesso: return std::make_unique<DatessoStrategy>();
        case StrategyKind::Tlhca: return std::make_unique<TlhcaStrategy>();
        case StrategyKind::Doa: return std::make_unique<DoaStrategy>();
        case StrategyKind::Rbc: return std::make_unique<RbcStrategy>(rbc);
    }
    throw std::invalid_argument("unknown strategy kind");
}

}  // namespace datesso
