#pragma once

// Debt-aware two-level constraint reasoning.
//
// Identification collects the abstract services whose selected component
// violates a hard local constraint at the current timestep n. Search then
// works on each of those services independently: it records which candidates
// are feasible at every forecast step in (n, m], shrinks m to the largest
// step every service can cover, and picks the candidate with the best
// debt-aware utility over (n, m]. Since the composite objective is a sum of
// per-service scores, the per-service argmax is a global argmax, so the work
// is O(Y * X) instead of O(Y^X). Global bounds only enter through interest.

#include "datesso/constraints.hpp"
#include "datesso/debt.hpp"
#include "datesso/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace datesso {

/// Integer workload predictions for the forecast steps n+1 .. n+steps.
class ForecastWindow {
public:
    ForecastWindow() = default;
    ForecastWindow(std::size_t steps, std::size_t abstract_count, std::vector<Workload> values);

    /// Rounds half-up: per_service[x][k] is the prediction for step n+1+k.
    static ForecastWindow from_predictions(const std::vector<std::vector<double>>& per_service);

    std::size_t steps() const { return steps_; }
    std::size_t abstract_count() const { return n_; }
    Workload at(std::size_t k, std::size_t x) const { return values_[k * n_ + x]; }
    std::span<const Workload> row(std::size_t k) const { return {values_.data() + k * n_, n_}; }
    std::vector<Workload> column(std::size_t x) const;
    /// The first `steps` steps.
    ForecastWindow prefix(std::size_t steps) const;

private:
    std::size_t steps_ = 0;
    std::size_t n_ = 0;
    std::vector<Workload> values_;
};

Workload round_half_up(double value);

enum class Objective {
    DebtAware,     ///< sum U - sum L - (principal + interest)
    DebtOblivious  ///< sum U - sum L
};

struct ReasonerContext {
    const ServiceRepository& repo;
    const SlaConstraints& sla;
    CostBounds cost;
    Objective objective = Objective::DebtAware;
};

/// M_x: for each forecast step t in (n, m], the candidate positions feasible at t.
struct FeasibilityRow {
    std::size_t abstract_index = 0;
    std::size_t n = 0;
    std::vector<std::size_t> candidates;          ///< positions that were evaluated
    std::vector<std::vector<std::size_t>> steps;  ///< steps[k] = S_{x, n+1+k}
    std::size_t evaluations = 0;
};

struct LargestStep {
    std::size_t m_x = 0;    ///< absolute timestep
    bool fallback = false;  ///< nothing feasible even at n+1
};

struct AdaptationDecision {
    std::vector<std::size_t> replaced;  ///< ascending abstract indices
    CompositionPlan new_plan;
    std::size_t horizon_used = 0;       ///< effective m after shrinking (absolute)
    std::vector<double> scores;         ///< aligned with `replaced`
    std::size_t evaluation_count = 0;   ///< candidate x forecast-step feasibility checks
    bool fallback = false;              ///< some service had no survivor (degraded)
    bool global_violation = false;      ///< set by strategies that treat global bounds as hard
};

/// Abstract services whose selected component is infeasible at workload w_now.
std::vector<std::size_t> identify_infeasible(const ServiceRepository& repo,
                                             const CompositionPlan& plan,
                                             std::span<const Workload> w_now,
                                             const SlaConstraints& sla);

FeasibilityRow build_feasibility_matrix(const ServiceRepository& repo, std::size_t x,
                                        std::span<const std::size_t> candidates,
                                        std::span<const Workload> forecasts, std::size_t n,
                                        const SlaConstraints& sla);

/// Largest m_x <= m such that one candidate is feasible at every t in (n, m_x].
/// Returns n+1 with the fallback flag when no candidate is feasible at n+1.
LargestStep largest_feasible_step(const FeasibilityRow& row, std::size_t n, std::size_t m);

/// Candidates feasible at every step of (n, m].
std::vector<std::size_t> survivors(const FeasibilityRow& row, std::size_t m);

/// S_{n,m} of candidate y for abstract service x over the forecast workloads.
/// Principal is charged only when y differs from the incumbent.
double candidate_score(const ReasonerContext& ctx, std::size_t x, std::size_t y,
                       std::size_t incumbent, std::span<const Workload> forecasts);

struct SearchResult {
    std::size_t candidate = 0;
    double score = 0.0;
};

/// Argmax of candidate_score over `survivors`; ties keep repository order.
/// Throws std::invalid_argument when `survivors` is empty.
SearchResult search_utility(const ReasonerContext& ctx, std::size_t x,
                            std::span<const std::size_t> survivors, std::size_t incumbent,
                            std::span<const Workload> forecasts);

/// Matrices, horizon shrink and argmax over the given abstract services.
AdaptationDecision search(const ReasonerContext& ctx, const CompositionPlan& plan, std::size_t n,
                          std::span<const Workload> w_now, const ForecastWindow& window,
                          std::span<const std::size_t> replace);

/// Identification followed by Search. Throws std::invalid_argument when nothing
/// is infeasible (callers only invoke it on a local violation).
AdaptationDecision reason(const ReasonerContext& ctx, const CompositionPlan& plan, std::size_t n,
                          std::span<const Workload> w_now, const ForecastWindow& window);

}  // namespace datesso
