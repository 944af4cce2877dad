#pragma once

// Domain types for service repositories, composition plans, SLA parameters
// and workload traces, plus CSV ingestion and synthetic data generators.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace datesso {

using Workload = std::int64_t;

/// Raised when an input file does not match the canonical CSV formats.
class IngestError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters (bad SLA bounds, degenerate cost bounds, ...).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ComponentService {
    std::string id;
    std::size_t abstract_index = 0;
    std::int64_t capacity_requests = 1;  ///< T: requests processed in capacity_latency
    double capacity_latency = 1.0;       ///< L: seconds to process T requests
    double overhead = 0.0;               ///< O: actuation seconds when composed in

    double per_request_time() const {
        return capacity_latency / static_cast<double>(capacity_requests);
    }
};

/// Throws ConfigError when a service breaks its invariants.
void validate_service(const ComponentService& service);

/// Candidates grouped by abstract service. Candidate order is significant:
/// it is the tie-break order everywhere downstream (first-listed wins).
class ServiceRepository {
public:
    ServiceRepository() = default;
    explicit ServiceRepository(std::vector<std::vector<ComponentService>> candidates);

    std::size_t abstract_count() const { return candidates_.size(); }
    std::size_t service_count() const;
    std::span<const ComponentService> candidates(std::size_t abstract_index) const {
        return candidates_.at(abstract_index);
    }
    const ComponentService& at(std::size_t abstract_index, std::size_t candidate) const {
        return candidates_.at(abstract_index).at(candidate);
    }
    /// Candidate position of `id` under `abstract_index`, or npos.
    std::size_t find(std::size_t abstract_index, const std::string& id) const;
    std::size_t max_candidates() const;
    double max_overhead() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::vector<std::vector<ComponentService>> candidates_;
};

/// One selected candidate per abstract service, stored as the candidate's
/// position in the repository list for that abstract service.
struct CompositionPlan {
    std::vector<std::size_t> selection;

    std::size_t size() const { return selection.size(); }
    bool operator==(const CompositionPlan&) const = default;

    /// First-listed candidate for every abstract service.
    static CompositionPlan initial(const ServiceRepository& repo);
};

/// Shared plan validator: throws std::invalid_argument on mismatch.
void validate_plan(const ServiceRepository& repo, const CompositionPlan& plan);
std::vector<std::string> plan_ids(const ServiceRepository& repo, const CompositionPlan& plan);

struct SlaConstraints {
    std::vector<double> local_latency;      ///< CL per abstract service, seconds per request
    std::vector<double> local_utilization;  ///< CU per abstract service
    double global_latency = 1.0;            ///< CL_global, seconds per request
    double global_utilization = 0.9;        ///< CU_global
    double compute_cost = 0.0025;           ///< C_com, currency per second

    std::size_t abstract_count() const { return local_latency.size(); }

    /// Same local bounds for every abstract service.
    static SlaConstraints uniform(std::size_t n, double local_latency, double local_utilization,
                                  double global_latency, double global_utilization,
                                  double compute_cost);
    /// CL=0.09 s, CL_global=1 s, CU=0.8, CU_global=0.9, C_com=0.0025.
    static SlaConstraints defaults(std::size_t n);
};

void validate_sla(const SlaConstraints& sla);

/// Row-major demand matrix: W[t][x] requests arriving at abstract service x at t.
class WorkloadTrace {
public:
    WorkloadTrace() = default;
    WorkloadTrace(std::size_t horizon, std::size_t abstract_count, std::vector<Workload> demand);

    std::size_t horizon() const { return horizon_; }
    std::size_t abstract_count() const { return n_; }
    Workload at(std::size_t t, std::size_t x) const { return demand_[t * n_ + x]; }
    std::span<const Workload> row(std::size_t t) const {
        return {demand_.data() + t * n_, n_};
    }
    std::vector<double> column(std::size_t x, std::size_t begin, std::size_t end) const;
    std::vector<double> column(std::size_t x) const { return column(x, 0, horizon_); }
    const std::vector<Workload>& data() const { return demand_; }

    bool operator==(const WorkloadTrace&) const = default;

private:
    std::size_t horizon_ = 0;
    std::size_t n_ = 0;
    std::vector<Workload> demand_;
};

// -----------------------------------------------------------------------------
// Ingestion

/// Header: abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s
ServiceRepository load_repository(const std::filesystem::path& path);
ServiceRepository parse_repository(std::istream& in, const std::string& source = "<stream>");
void save_repository(const ServiceRepository& repo, const std::filesystem::path& path);

/// Header: timestep,w_0,...,w_{N-1}; timesteps contiguous from 0.
WorkloadTrace load_workload(const std::filesystem::path& path);
WorkloadTrace parse_workload(std::istream& in, const std::string& source = "<stream>");
void save_workload(const WorkloadTrace& trace, const std::filesystem::path& path);

// -----------------------------------------------------------------------------
// Synthetic data

/// Shape of a synthetic workload column: base load plus a diurnal cycle
/// (ranging over [base_load, base_load + diurnal_amplitude]), decaying bursts
/// and long-memory noise.
struct BurstProfile {
    double base_load = 300.0;
    double diurnal_amplitude = 150.0;
    double period = 2400.0;              ///< timesteps per cycle
    double burst_rate = 0.002;           ///< burst onsets per timestep
    double burst_amplitude = 160.0;
    double burst_decay = 0.97;           ///< per-timestep burst decay factor
    double noise_sd = 6.0;               ///< innovation sd of the long-memory noise
    double noise_memory = 0.3;           ///< fractional d of the noise process
    double service_spread = 0.15;        ///< per-service scale jitter (0 = identical columns)
};

WorkloadTrace generate_synthetic_trace(std::uint64_t seed, std::size_t horizon, std::size_t n,
                                       const BurstProfile& profile = {});

/// Candidates whose load at the local latency bound (CL * T / L) spans
/// [load_low, load_high] geometrically, jittered and shuffled, per abstract service.
struct RepositoryProfile {
    std::size_t candidates = 10;
    double load_low = 260.0;
    double load_high = 760.0;
    double overhead_min = 0.5;
    double overhead_max = 10.0;
    double local_latency = 0.09;
};

ServiceRepository generate_synthetic_repository(std::uint64_t seed, std::size_t n,
                                                const RepositoryProfile& profile = {});

}  // namespace datesso
