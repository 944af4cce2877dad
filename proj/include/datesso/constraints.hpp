#pragma once

// Hard local and soft global latency/utilization constraints.
//
// Checks compare RAW seconds against the SLA bounds. Normalized latency
// (values in [0, 1]) only feeds the debt/utility arithmetic; local and global
// values share one normalization bound, N * max(CL_x), so the global
// normalized latency is exactly the sum of the local normalized latencies.

#include "datesso/model.hpp"

#include <span>

namespace datesso {

struct LatencyValue {
    double raw = 0.0;   ///< L * w / T, seconds
    double norm = 0.0;  ///< raw / latency_normalization_bound, clamped to [0, 1]
};

struct LocalObservation {
    double latency_raw = 0.0;
    double latency_norm = 0.0;
    double utilization = 0.0;
    bool latency_ok = true;
    bool utilization_ok = true;
    bool feasible = true;
};

struct GlobalObservation {
    double latency = 0.0;       ///< sum of selected raw latencies, seconds
    double latency_norm = 0.0;  ///< latency / latency_normalization_bound, clamped
    double utilization = 0.0;   ///< mean of selected utilizations
    bool latency_violated = false;
    bool utilization_violated = false;
};

/// N * max_x CL_x: the largest latency a composition of feasible components can reach.
double latency_normalization_bound(const SlaConstraints& sla);
/// CL_global on the normalized scale, clamped to [0, 1].
double normalized_global_latency_bound(const SlaConstraints& sla);

LatencyValue local_latency(const ComponentService& service, Workload w, const SlaConstraints& sla);
/// clamp(L w / (CL T), 0, 1); requests beyond capacity are discarded.
double local_utilization(const ComponentService& service, Workload w, const SlaConstraints& sla);
/// latency_raw <= CL and utilization >= CU, both inclusive.
bool is_feasible(const ComponentService& service, Workload w, const SlaConstraints& sla);
LocalObservation observe_local(const ComponentService& service, Workload w,
                               const SlaConstraints& sla);

/// Relative latency excess plus utilization shortfall; zero iff feasible.
double violation_magnitude(const ComponentService& service, Workload w, const SlaConstraints& sla);

GlobalObservation global_observe(const ServiceRepository& repo, const CompositionPlan& plan,
                                 std::span<const Workload> w_row, const SlaConstraints& sla);

}  // namespace datesso
