#include "datesso/debt.hpp"

#include "datesso/constraints.hpp"
#include "datesso/csv.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

namespace datesso {

CostBounds default_cost_bounds(const ServiceRepository& repo, const SlaConstraints& sla) {
    const double upper = repo.max_overhead() * sla.compute_cost;
    return upper > 0.0 ? CostBounds{0.0, upper} : CostBounds{0.0, 1.0};
}

double raw_principal(const ComponentService& service, const SlaConstraints& sla) {
    return service.overhead * sla.compute_cost;
}

double principal(const ComponentService& service, const SlaConstraints& sla,
                 const CostBounds& bounds) {
    if (!(bounds.upper != bounds.lower)) {
        throw ConfigError("principal cost bounds must differ (lower == upper)");
    }
    const double scaled = (raw_principal(service, sla) - bounds.lower) / (bounds.upper - bounds.lower);
    return std::clamp(scaled, 0.0, 1.0);
}

InterestBounds interest_bounds(const SlaConstraints& sla) {
    return {sla.global_utilization, normalized_global_latency_bound(sla)};
}

Interest interest(std::span<const double> utilizations, std::span<const double> latencies_norm,
                  const InterestBounds& bounds) {
    if (utilizations.size() != latencies_norm.size()) {
        throw std::invalid_argument("interest: utilization and latency series lengths differ");
    }
    Interest acc;
    for (std::size_t t = 0; t < utilizations.size(); ++t) {
        if (bounds.utilization >= utilizations[t]) acc.alpha += bounds.utilization - utilizations[t];
        if (latencies_norm[t] >= bounds.latency) acc.beta += latencies_norm[t] - bounds.latency;
    }
    return acc;
}

Interest interest(std::span<const double> utilizations, std::span<const double> latencies_norm,
                  const SlaConstraints& sla) {
    return interest(utilizations, latencies_norm, interest_bounds(sla));
}

double utility_score(std::span<const double> utilizations, std::span<const double> latencies_norm,
                     double debt_value) {
    double u = 0.0;
    double l = 0.0;
    for (double v : utilizations) u += v;
    for (double v : latencies_norm) l += v;
    return u - l - debt_value;
}

// =============================================================================
// DebtLedger
// =============================================================================

DebtLedger::DebtLedger(const ServiceRepository& repo, const CompositionPlan& plan,
                       std::size_t start)
    : start_(start), pending_principal_(plan.size(), 0.0) {
    validate_plan(repo, plan);
    for (std::size_t x = 0; x < plan.size(); ++x) {
        const auto& id = repo.at(x, plan.selection[x]).id;
        open_.push_back(records_.size());
        records_.push_back(DebtRecord{id, x, start, start, 0.0, 0.0, 0.0, true});
        component_debt_.try_emplace(id, 0.0);
    }
}

void DebtLedger::replace(std::size_t t, std::size_t x, const std::string& component_id,
                         double principal_value) {
    auto& old = records_.at(open_.at(x));
    old.open = false;
    old.end = t;
    open_[x] = records_.size();
    records_.push_back(DebtRecord{component_id, x, t, t, principal_value, 0.0, 0.0, true});
    pending_principal_[x] += principal_value;
    component_debt_[component_id] += principal_value;
    total_ += principal_value;
    principal_total_ += principal_value;
}

void DebtLedger::accrue(std::size_t t, std::size_t x, double alpha, double beta) {
    auto& record = records_.at(open_.at(x));
    record.alpha += alpha;
    record.beta += beta;
    record.end = t + 1;
    auto& cumulative = component_debt_[record.component_id];
    cumulative += alpha + beta;
    total_ += alpha + beta;
    interest_total_ += alpha + beta;
    rows_.push_back(LedgerRow{t, record.component_id, pending_principal_[x], alpha, beta, cumulative});
    pending_principal_[x] = 0.0;
}

void DebtLedger::close_timestep(std::size_t t) {
    if (t != start_ + series_.size()) throw std::logic_error("ledger timesteps must be contiguous");
    series_.push_back(total_);
}

double DebtLedger::accumulated_debt(std::size_t t) const {
    if (t < start_ || series_.empty()) return 0.0;
    const std::size_t i = t - start_;
    return i < series_.size() ? series_[i] : series_.back();
}

void write_ledger_csv(const DebtLedger& ledger, std::ostream& out) {
    out << "timestep,component_id,principal,alpha,beta,debt_cumulative\n";
    for (const auto& row : ledger.rows()) {
        out << row.timestep << ',' << row.component_id << ',' << csv::format(row.principal) << ','
            << csv::format(row.alpha) << ',' << csv::format(row.beta) << ','
            << csv::format(row.debt_cumulative) << '\n';
    }
}

}  // namespace datesso
