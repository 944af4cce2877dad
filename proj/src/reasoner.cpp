#include "datesso/reasoner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace datesso {

// =============================================================================
// ForecastWindow
// =============================================================================

ForecastWindow::ForecastWindow(std::size_t steps, std::size_t abstract_count,
                               std::vector<Workload> values)
    : steps_(steps), n_(abstract_count), values_(std::move(values)) {
    if (values_.size() != steps_ * n_) throw std::invalid_argument("forecast window size mismatch");
}

Workload round_half_up(double value) {
    return static_cast<Workload>(std::floor(std::max(0.0, value) + 0.5));
}

ForecastWindow ForecastWindow::from_predictions(const std::vector<std::vector<double>>& per_service) {
    const std::size_t n = per_service.size();
    const std::size_t steps = n ? per_service.front().size() : 0;
    std::vector<Workload> values(steps * n);
    for (std::size_t x = 0; x < n; ++x) {
        if (per_service[x].size() != steps) throw std::invalid_argument("ragged forecast window");
        for (std::size_t k = 0; k < steps; ++k) values[k * n + x] = round_half_up(per_service[x][k]);
    }
    return ForecastWindow(steps, n, std::move(values));
}

std::vector<Workload> ForecastWindow::column(std::size_t x) const {
    std::vector<Workload> out(steps_);
    for (std::size_t k = 0; k < steps_; ++k) out[k] = at(k, x);
    return out;
}

ForecastWindow ForecastWindow::prefix(std::size_t steps) const {
    steps = std::min(steps, steps_);
    return ForecastWindow(steps, n_, std::vector<Workload>(values_.begin(),
                                                           values_.begin() + static_cast<std::ptrdiff_t>(steps * n_)));
}

// =============================================================================
// Identification
// =============================================================================

std::vector<std::size_t> identify_infeasible(const ServiceRepository& repo,
                                             const CompositionPlan& plan,
                                             std::span<const Workload> w_now,
                                             const SlaConstraints& sla) {
    validate_plan(repo, plan);
    std::vector<std::size_t> out;
    for (std::size_t x = 0; x < plan.size(); ++x) {
        const auto obs = observe_local(repo.at(x, plan.selection[x]), w_now[x], sla);
        if (!obs.latency_ok || !obs.utilization_ok) out.push_back(x);
    }
    return out;
}

// =============================================================================
// Search
// =============================================================================

FeasibilityRow build_feasibility_matrix(const ServiceRepository& repo, std::size_t x,
                                        std::span<const std::size_t> candidates,
                                        std::span<const Workload> forecasts, std::size_t n,
                                        const SlaConstraints& sla) {
    FeasibilityRow row;
    row.abstract_index = x;
    row.n = n;
    row.candidates.assign(candidates.begin(), candidates.end());
    row.steps.resize(forecasts.size());
    for (std::size_t y : candidates) {
        const auto& service = repo.at(x, y);
        for (std::size_t k = 0; k < forecasts.size(); ++k) {
            ++row.evaluations;
            if (is_feasible(service, forecasts[k], sla)) row.steps[k].push_back(y);
        }
    }
    return row;
}

namespace {

/// Number of leading forecast steps candidate y stays feasible for.
std::size_t feasible_run(const FeasibilityRow& row, std::size_t y) {
    std::size_t run = 0;
    for (const auto& step : row.steps) {
        if (std::find(step.begin(), step.end(), y) == step.end()) break;
        ++run;
    }
    return run;
}

}  // namespace

LargestStep largest_feasible_step(const FeasibilityRow& row, std::size_t n, std::size_t m) {
    const std::size_t horizon = std::min(m - n, row.steps.size());
    std::size_t best = 0;
    for (std::size_t y : row.candidates) best = std::max(best, std::min(feasible_run(row, y), horizon));
    if (best == 0) return {n + 1, true};
    return {n + best, false};
}

std::vector<std::size_t> survivors(const FeasibilityRow& row, std::size_t m) {
    const std::size_t needed = m - row.n;
    std::vector<std::size_t> out;
    for (std::size_t y : row.candidates) {
        if (feasible_run(row, y) >= needed) out.push_back(y);
    }
    return out;
}

double candidate_score(const ReasonerContext& ctx, std::size_t x, std::size_t y,
                       std::size_t incumbent, std::span<const Workload> forecasts) {
    const auto& service = ctx.repo.at(x, y);
    std::vector<double> u(forecasts.size());
    std::vector<double> l(forecasts.size());
    for (std::size_t k = 0; k < forecasts.size(); ++k) {
        u[k] = local_utilization(service, forecasts[k], ctx.sla);
        l[k] = local_latency(service, forecasts[k], ctx.sla).norm;
    }
    if (ctx.objective == Objective::DebtOblivious) return utility_score(u, l, 0.0);
    const double p = y == incumbent ? 0.0 : principal(service, ctx.sla, ctx.cost);
    return utility_score(u, l, debt(p, interest(u, l, ctx.sla)));
}

SearchResult search_utility(const ReasonerContext& ctx, std::size_t x,
                            std::span<const std::size_t> candidates, std::size_t incumbent,
                            std::span<const Workload> forecasts) {
    if (candidates.empty()) throw std::invalid_argument("search_utility: no surviving candidates");
    SearchResult best{candidates.front(), candidate_score(ctx, x, candidates.front(), incumbent, forecasts)};
    for (std::size_t i = 1; i < candidates.size(); ++i) {
        const double s = candidate_score(ctx, x, candidates[i], incumbent, forecasts);
        if (s > best.score) best = {candidates[i], s};
    }
    return best;
}

namespace {

/// Least-violating candidate at workload w; ties prefer the incumbent, then
/// repository order.
std::size_t least_violating(const ServiceRepository& repo, std::size_t x,
                            std::span<const std::size_t> candidates, std::size_t incumbent,
                            Workload w, const SlaConstraints& sla) {
    std::size_t best = candidates.front();
    double best_violation = violation_magnitude(repo.at(x, best), w, sla);
    for (std::size_t y : candidates) {
        const double v = violation_magnitude(repo.at(x, y), w, sla);
        if (v < best_violation || (v == best_violation && y == incumbent)) {
            best = y;
            best_violation = v;
        }
    }
    return best;
}

struct ServiceSearch {
    FeasibilityRow row;
    bool no_current_feasible = false;
    LargestStep largest;
};

}  // namespace

AdaptationDecision search(const ReasonerContext& ctx, const CompositionPlan& plan, std::size_t n,
                          std::span<const Workload> w_now, const ForecastWindow& window,
                          std::span<const std::size_t> replace) {
    validate_plan(ctx.repo, plan);
    if (window.steps() == 0) throw std::invalid_argument("search: empty forecast window");
    const std::size_t m = n + window.steps();

    AdaptationDecision decision;
    decision.replaced.assign(replace.begin(), replace.end());
    std::sort(decision.replaced.begin(), decision.replaced.end());
    decision.replaced.erase(std::unique(decision.replaced.begin(), decision.replaced.end()),
                            decision.replaced.end());
    decision.new_plan = plan;
    decision.horizon_used = m;

    const auto count = static_cast<std::ptrdiff_t>(decision.replaced.size());
    std::vector<ServiceSearch> per_service(decision.replaced.size());

    // Feasibility matrices. Only candidates that satisfy the local constraints
    // at the realized workload of n are considered.
#pragma omp parallel for schedule(static) if (count >= 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const std::size_t x = decision.replaced[static_cast<std::size_t>(i)];
        auto& s = per_service[static_cast<std::size_t>(i)];
        std::vector<std::size_t> eligible;
        const auto all = ctx.repo.candidates(x);
        for (std::size_t y = 0; y < all.size(); ++y) {
            if (is_feasible(all[y], w_now[x], ctx.sla)) eligible.push_back(y);
        }
        if (eligible.empty()) {
            s.no_current_feasible = true;
            for (std::size_t y = 0; y < all.size(); ++y) eligible.push_back(y);
        }
        s.row = build_feasibility_matrix(ctx.repo, x, eligible, window.column(x), n, ctx.sla);
        s.largest = largest_feasible_step(s.row, n, m);
    }

    // Shrink the horizon to what every service can cover.
    std::size_t m_used = m;
    for (const auto& s : per_service) {
        decision.evaluation_count += s.row.evaluations;
        m_used = std::min(m_used, s.largest.m_x);
    }
    decision.horizon_used = m_used;
    const std::size_t used_steps = m_used - n;

    decision.scores.assign(decision.replaced.size(), 0.0);
    std::vector<char> degraded(decision.replaced.size(), 0);
#pragma omp parallel for schedule(static) if (count >= 8)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto idx = static_cast<std::size_t>(i);
        const std::size_t x = decision.replaced[idx];
        const auto& s = per_service[idx];
        const std::size_t incumbent = plan.selection[x];
        auto forecasts = window.column(x);
        forecasts.resize(used_steps);

        const auto pool = survivors(s.row, m_used);
        if (pool.empty()) {
            const std::size_t pick = least_violating(ctx.repo, x, s.row.candidates, incumbent,
                                                     forecasts.front(), ctx.sla);
            decision.new_plan.selection[x] = pick;
            decision.scores[idx] = candidate_score(ctx, x, pick, incumbent, forecasts);
            degraded[idx] = 1;
        } else {
            const auto best = search_utility(ctx, x, pool, incumbent, forecasts);
            decision.new_plan.selection[x] = best.candidate;
            decision.scores[idx] = best.score;
        }
        if (s.no_current_feasible) degraded[idx] = 1;
    }
    decision.fallback = std::any_of(degraded.begin(), degraded.end(), [](char c) { return c != 0; });
    return decision;
}

AdaptationDecision reason(const ReasonerContext& ctx, const CompositionPlan& plan, std::size_t n,
                          std::span<const Workload> w_now, const ForecastWindow& window) {
    const auto infeasible = identify_infeasible(ctx.repo, plan, w_now, ctx.sla);
    if (infeasible.empty()) {
        throw std::invalid_argument("reason: no locally infeasible component; nothing to adapt");
    }
    return search(ctx, plan, n, w_now, window, infeasible);
}

}  // namespace datesso
