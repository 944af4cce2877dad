#pragma once

// Adaptation strategies behind one interface: DATESSO plus the three
// comparison baselines.
//
//   TLHCA  both constraint levels hard; triggers on local or global violation
//          and reruns the search over every service when the plan breaks a
//          global bound on the forecast window.
//   DOA    DATESSO without the debt term.
//   RBC    region-based composition: candidates are clustered on historical
//          utilization/latency; triggers on global violations only.
//
// RBC internals: k = 3 regions, ranking by mean utilization minus mean
// normalized latency, with history derived from capacity and the realized
// workload. No region expansion is attempted.

#include "datesso/model.hpp"
#include "datesso/reasoner.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace datesso {

enum class StrategyKind { Datesso, Tlhca, Doa, Rbc };

std::string_view strategy_name(StrategyKind kind);
/// Case-insensitive; throws ConfigError for unknown names.
StrategyKind parse_strategy(std::string_view name);

AdaptationDecision tlhca_reason(const ReasonerContext& ctx, const CompositionPlan& plan,
                                std::size_t n, std::span<const Workload> w_now,
                                const ForecastWindow& window);

AdaptationDecision doa_reason(const ReasonerContext& ctx, const CompositionPlan& plan,
                              std::size_t n, std::span<const Workload> w_now,
                              const ForecastWindow& window);

// -----------------------------------------------------------------------------
// Regions

struct QosPoint {
    double utilization = 0.0;
    double latency = 0.0;  ///< normalized
};

struct Region {
    double centroid_utilization = 0.0;
    double centroid_latency = 0.0;
    std::vector<std::size_t> members;  ///< indices into the clustered points
};

/// k-means (k-means++ seeding from `seed`, at most 50 Lloyd iterations).
/// k is reduced to the point count; empty clusters are dropped. Regions are
/// ordered by centroid utilization, highest first.
std::vector<Region> cluster_regions(std::span<const QosPoint> points, std::size_t k,
                                    std::uint64_t seed);

/// Mean utilization / normalized latency each candidate of x would have shown
/// under the realized workloads `history`.
std::vector<QosPoint> candidate_history(const ServiceRepository& repo, std::size_t x,
                                        std::span<const Workload> history,
                                        const SlaConstraints& sla);

struct RbcOptions {
    std::size_t regions = 3;
    std::uint64_t seed = 42;
};

/// Uses rows [0, n] of the realized trace; row n is the current workload.
AdaptationDecision rbc_reason(const ServiceRepository& repo, const SlaConstraints& sla,
                              const CompositionPlan& plan, const WorkloadTrace& trace,
                              std::size_t n, const RbcOptions& options = {});

// -----------------------------------------------------------------------------
// Strategy interface used by the simulator

struct StepContext {
    const ServiceRepository& repo;
    const SlaConstraints& sla;
    CostBounds cost;
    const CompositionPlan& plan;
    const WorkloadTrace& trace;
    std::size_t n = 0;
    std::span<const Workload> w_now;
    const ForecastWindow* window = nullptr;  ///< null for strategies that do not forecast
    bool local_violation = false;
    bool global_violation = false;
};

class Strategy {
public:
    virtual ~Strategy() = default;
    virtual StrategyKind kind() const = 0;
    virtual bool uses_forecasts() const { return true; }
    virtual bool triggered(const StepContext& step) const = 0;
    virtual AdaptationDecision decide(const StepContext& step) const = 0;
};

std::unique_ptr<Strategy> make_strategy(StrategyKind kind, const RbcOptions& rbc = {});

}  // namespace datesso
