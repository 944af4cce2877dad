#pragma once

// Temporal debt model: principal (one-off adaptation cost), interest accrued
// while a component contributes to potential global violations, debt, and the
// debt-aware utility score. DebtLedger keeps the per-run accounting.

#include "datesso/model.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace datesso {

/// Min-max bounds used to normalize raw principal cost into [0, 1].
struct CostBounds {
    double lower = 0.0;
    double upper = 1.0;
};

/// [0, max_overhead * C_com] over the repository; [0, 1] when every cost is zero.
CostBounds default_cost_bounds(const ServiceRepository& repo, const SlaConstraints& sla);

double raw_principal(const ComponentService& service, const SlaConstraints& sla);
/// Throws ConfigError when bounds.lower == bounds.upper.
double principal(const ComponentService& service, const SlaConstraints& sla,
                 const CostBounds& bounds);

/// Global bounds on the normalized scale the interest terms compare against.
struct InterestBounds {
    double utilization = 0.9;  ///< CU_global
    double latency = 1.0;      ///< CL_global, normalized
};

InterestBounds interest_bounds(const SlaConstraints& sla);

struct Interest {
    double alpha = 0.0;  ///< sum of (CU_global - U_t) where CU_global >= U_t
    double beta = 0.0;   ///< sum of (L_t - CL_global) where L_t >= CL_global
    double total() const { return alpha + beta; }
};

/// Throws std::invalid_argument when the series lengths differ.
Interest interest(std::span<const double> utilizations, std::span<const double> latencies_norm,
                  const InterestBounds& bounds);
Interest interest(std::span<const double> utilizations, std::span<const double> latencies_norm,
                  const SlaConstraints& sla);

inline double debt(double principal_value, const Interest& accrued) {
    return principal_value + accrued.total();
}

/// S = sum U - sum L - D.
double utility_score(std::span<const double> utilizations, std::span<const double> latencies_norm,
                     double debt_value);

struct DebtRecord {
    std::string component_id;
    std::size_t abstract_index = 0;
    std::size_t start = 0;  ///< first timestep the component was live
    std::size_t end = 0;    ///< one past the last accrued timestep
    double principal = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    bool open = true;

    double debt() const { return principal + alpha + beta; }
};

struct LedgerRow {
    std::size_t timestep = 0;
    std::string component_id;
    double principal = 0.0;
    double alpha = 0.0;
    double beta = 0.0;
    double debt_cumulative = 0.0;  ///< the component's debt since run start
};

/// Single-writer ledger of a simulation run. Each abstract service has one
/// open record for its live component; replacing the component freezes the
/// record and opens a new one.
class DebtLedger {
public:
    DebtLedger() = default;
    /// Opens uncharged records for the initial plan at `start`.
    DebtLedger(const ServiceRepository& repo, const CompositionPlan& plan, std::size_t start);

    /// Swap in a new component for abstract service x at timestep t.
    void replace(std::size_t t, std::size_t x, const std::string& component_id,
                 double principal_value);
    /// Add one timestep of interest for the live component of x; finish each
    /// timestep with close_timestep(t).
    void accrue(std::size_t t, std::size_t x, double alpha, double beta);
    void close_timestep(std::size_t t);

    /// D_{1,t}: principals charged plus interest accrued up to and including t.
    double accumulated_debt(std::size_t t) const;
    double total_debt() const { return total_; }
    double total_principal() const { return principal_total_; }
    double total_interest() const { return interest_total_; }
    std::size_t start() const { return start_; }

    const std::vector<DebtRecord>& records() const { return records_; }
    const std::vector<LedgerRow>& rows() const { return rows_; }
    const std::vector<double>& series() const { return series_; }
    /// Cumulative debt per component id over the whole run.
    const std::map<std::string, double>& component_debt() const { return component_debt_; }

private:
    std::size_t start_ = 0;
    std::vector<DebtRecord> records_;
    std::vector<std::size_t> open_;  ///< per abstract service: index into records_
    std::vector<double> pending_principal_;
    std::vector<LedgerRow> rows_;
    std::vector<double> series_;     ///< accumulated debt for t = start_ ...
    std::map<std::string, double> component_debt_;
    double total_ = 0.0;
    double principal_total_ = 0.0;
    double interest_total_ = 0.0;
};

void write_ledger_csv(const DebtLedger& ledger, std::ostream& out);

}  // namespace datesso
