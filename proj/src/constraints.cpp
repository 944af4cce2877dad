#include "datesso/constraints.hpp"

#include <algorithm>
#include <stdexcept>

namespace datesso {

double latency_normalization_bound(const SlaConstraints& sla) {
    const double max_local = *std::max_element(sla.local_latency.begin(), sla.local_latency.end());
    return static_cast<double>(sla.local_latency.size()) * max_local;
}

double normalized_global_latency_bound(const SlaConstraints& sla) {
    return std::clamp(sla.global_latency / latency_normalization_bound(sla), 0.0, 1.0);
}

LatencyValue local_latency(const ComponentService& service, Workload w, const SlaConstraints& sla) {
    const double raw = service.capacity_latency * static_cast<double>(w) /
                       static_cast<double>(service.capacity_requests);
    return {raw, std::clamp(raw / latency_normalization_bound(sla), 0.0, 1.0)};
}

double local_utilization(const ComponentService& service, Workload w, const SlaConstraints& sla) {
    const double cl = sla.local_latency.at(service.abstract_index);
    const double u = (service.capacity_latency * static_cast<double>(w)) /
                     (cl * static_cast<double>(service.capacity_requests));
    return std::clamp(u, 0.0, 1.0);
}

LocalObservation observe_local(const ComponentService& service, Workload w,
                               const SlaConstraints& sla) {
    const auto latency = local_latency(service, w, sla);
    LocalObservation obs;
    obs.latency_raw = latency.raw;
    obs.latency_norm = latency.norm;
    obs.utilization = local_utilization(service, w, sla);
    obs.latency_ok = latency.raw <= sla.local_latency.at(service.abstract_index);
    obs.utilization_ok = obs.utilization >= sla.local_utilization.at(service.abstract_index);
    obs.feasible = obs.latency_ok && obs.utilization_ok;
    return obs;
}

bool is_feasible(const ComponentService& service, Workload w, const SlaConstraints& sla) {
    return observe_local(service, w, sla).feasible;
}

double violation_magnitude(const ComponentService& service, Workload w, const SlaConstraints& sla) {
    const double cl = sla.local_latency.at(service.abstract_index);
    const double cu = sla.local_utilization.at(service.abstract_index);
    const auto obs = observe_local(service, w, sla);
    return std::max(0.0, obs.latency_raw / cl - 1.0) + std::max(0.0, cu - obs.utilization);
}

GlobalObservation global_observe(const ServiceRepository& repo, const CompositionPlan& plan,
                                 std::span<const Workload> w_row, const SlaConstraints& sla) {
    if (w_row.size() != plan.size()) throw std::invalid_argument("workload row size mismatch");
    GlobalObservation g;
    double utilization_sum = 0.0;
    for (std::size_t x = 0; x < plan.size(); ++x) {
        const auto& service = repo.at(x, plan.selection[x]);
        g.latency += local_latency(service, w_row[x], sla).raw;
        utilization_sum += local_utilization(service, w_row[x], sla);
    }
    g.utilization = utilization_sum / static_cast<double>(plan.size());
    g.latency_norm = std::clamp(g.latency / latency_normalization_bound(sla), 0.0, 1.0);
    g.latency_violated = g.latency > sla.global_latency;
    g.utilization_violated = g.utilization < sla.global_utilization;
    return g;
}

}  // namespace datesso
