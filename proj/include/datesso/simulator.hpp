#pragma once

// Discrete-time replay of a workload trace against one adaptation strategy,
// plus the multi-strategy comparison driver and its report writers.
//
// Protocol: the first floor(2/3 horizon) rows train the forecaster; the rest
// are replayed one timestep at a time. At each timestep the selected
// components accrue interest on the realized workload, constraints are
// checked, and a triggered strategy's decision takes effect at the next
// timestep, which is when principal is charged.

#include "datesso/baselines.hpp"
#include "datesso/constraints.hpp"
#include "datesso/debt.hpp"
#include "datesso/forecaster.hpp"
#include "datesso/model.hpp"
#include "datesso/reasoner.hpp"
#include "datesso/stats.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace datesso {

struct ForecasterConfig {
    std::size_t p_max = 2;
    std::size_t q_max = 2;
    std::size_t refit_every = 600;  ///< timesteps between refits; 0 disables
};

struct SimulationConfig {
    std::size_t horizon_offset = 5;  ///< forecast steps m - n
    ForecasterConfig forecaster;
    RbcOptions rbc;
};

/// floor(2/3 * horizon).
std::size_t training_length(std::size_t horizon);

/// Per-service model summary from the forecast table build.
struct ServiceModelInfo {
    std::size_t p = 0;
    std::size_t q = 0;
    double d = 0.0;
    bool fallback = false;  ///< fit failed; mean forecasts
    std::size_t refits = 0;
};

/// Forecasts for every test timestep n: predictions for n+1 .. n+steps made
/// from rows [0, n]. Strategies share one table.
class ForecastTable {
public:
    ForecastTable() = default;
    ForecastTable(std::size_t start, std::size_t end, std::size_t abstract_count, std::size_t steps);

    std::size_t start() const { return start_; }
    std::size_t end() const { return end_; }
    std::size_t steps() const { return steps_; }
    std::size_t abstract_count() const { return n_; }

    double& at(std::size_t t, std::size_t x, std::size_t k) {
        return values_[((t - start_) * n_ + x) * steps_ + k];
    }
    double at(std::size_t t, std::size_t x, std::size_t k) const {
        return values_[((t - start_) * n_ + x) * steps_ + k];
    }
    /// Integer window for timestep n (rounded half-up).
    ForecastWindow window(std::size_t n) const;

    std::vector<ServiceModelInfo> models;

    bool operator==(const ForecastTable& other) const {
        return start_ == other.start_ && end_ == other.end_ && n_ == other.n_ &&
               steps_ == other.steps_ && values_ == other.values_;
    }

private:
    std::size_t start_ = 0;
    std::size_t end_ = 0;
    std::size_t n_ = 0;
    std::size_t steps_ = 0;
    std::vector<double> values_;
};

/// Fits one model per abstract service on the training rows (automatic order
/// selection; mean forecasts when the fit fails), refitting with the same
/// orders every `refit_every` test steps. Parallel over services.
ForecastTable build_forecast_table(const WorkloadTrace& trace, const SimulationConfig& config);
/// Single-threaded reference with identical output.
ForecastTable build_forecast_table_serial(const WorkloadTrace& trace, const SimulationConfig& config);

struct StepRecord {
    std::size_t timestep = 0;
    GlobalObservation global;
    std::size_t local_violations = 0;   ///< 0..2: latency, utilization (any component)
    std::size_t global_violations = 0;  ///< 0..2: latency, utilization
    double utility = 0.0;               ///< sum U - sum L over the plan
    bool adapted = false;               ///< strategy invoked at this timestep
};

struct DecisionEvent {
    std::size_t timestep = 0;
    std::size_t abstract_index = 0;
    std::string old_id;
    std::string new_id;
    double score = 0.0;
    std::size_t horizon_used = 0;
    bool fallback = false;
};

struct SimulationResult {
    StrategyKind strategy = StrategyKind::Datesso;
    std::string label;
    std::size_t start = 0;
    std::vector<StepRecord> steps;
    std::vector<DecisionEvent> decisions;
    DebtLedger ledger;
    std::vector<double> reasoning_seconds;  ///< one per strategy invocation
    std::size_t adaptations = 0;
    std::size_t evaluation_count = 0;
    std::size_t local_violations = 0;
    std::size_t global_violations = 0;
    std::size_t global_latency_violations = 0;
    std::size_t global_utilization_violations = 0;
    std::size_t global_violation_flags = 0;  ///< decisions that could not meet a global bound
    double utility_total = 0.0;              ///< sum over steps of sum U - sum L
    double s_total = 0.0;                    ///< utility_total - final debt
    CompositionPlan final_plan;

    std::size_t violations() const { return local_violations + global_violations; }
    double final_debt() const { return ledger.total_debt(); }
};

/// Throws std::invalid_argument when trace, repository and SLA disagree on N,
/// or when the trace is too short to split.
SimulationResult run(StrategyKind strategy, const ServiceRepository& repo, const WorkloadTrace& trace,
                     const SlaConstraints& sla, const SimulationConfig& config,
                     const ForecastTable& table);
/// Builds its own forecast table.
SimulationResult run(StrategyKind strategy, const ServiceRepository& repo, const WorkloadTrace& trace,
                     const SlaConstraints& sla, const SimulationConfig& config);

struct PairwiseTest {
    std::string metric;
    std::string a;
    std::string b;
    std::optional<KruskalWallis> result;  ///< empty when a sample is too small
    std::optional<double> eta2;
};

struct ComparisonReport {
    std::vector<SimulationResult> results;
    std::vector<std::optional<double>> scores;  ///< aligned with results; empty optional = undefined
    std::string score_note;                      ///< set when no score could be computed
    std::vector<PairwiseTest> tests;
};

/// Runs every strategy on the same inputs and forecast table. Duplicate
/// strategies get suffixed labels. Throws std::invalid_argument for < 2 strategies.
ComparisonReport compare(const std::vector<StrategyKind>& strategies, const ServiceRepository& repo,
                         const WorkloadTrace& trace, const SlaConstraints& sla,
                         const SimulationConfig& config);

// -----------------------------------------------------------------------------
// Writers

void write_timeseries_csv(const SimulationResult& result, std::ostream& out);
void write_decisions_csv(const SimulationResult& result, std::ostream& out);
/// Wall-clock, so not reproducible between runs.
void write_reasoning_times_csv(const SimulationResult& result, std::ostream& out);
void write_summary_json(const SimulationResult& result, std::ostream& out);
void write_comparison_json(const ComparisonReport& report, std::ostream& out);

/// <dir>/timeseries.csv, decisions.csv, ledger.csv, reasoning_times.csv, summary.json.
void write_result(const SimulationResult& result, const std::filesystem::path& dir);
/// One sub-directory per strategy label plus <dir>/comparison.json.
void write_report(const ComparisonReport& report, const std::filesystem::path& dir);

}  // namespace datesso
