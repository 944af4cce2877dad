#pragma once

// Run configuration and the command-line front end.
//
// Exit codes: 0 success, 2 configuration or input error, 3 runtime error.

#include "datesso/baselines.hpp"
#include "datesso/model.hpp"
#include "datesso/simulator.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace datesso {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;

/// Used when no repository / workload file is configured.
struct SyntheticSystem {
    std::size_t abstract_services = 10;
    std::size_t candidates = 10;
    std::size_t horizon = 7200;
};

struct SlaSettings {
    double local_latency_s = 0.09;
    double global_latency_s = 1.0;
    double local_utilization = 0.8;
    double global_utilization = 0.9;
    double compute_cost = 0.0025;
};

struct RunConfig {
    std::optional<std::filesystem::path> repository;
    std::optional<std::filesystem::path> workload;
    SyntheticSystem synthetic;
    std::vector<StrategyKind> strategies{StrategyKind::Datesso, StrategyKind::Tlhca, StrategyKind::Doa,
                                         StrategyKind::Rbc};
    SlaSettings sla;
    SimulationConfig simulation;
    std::uint64_t seed = 42;
    std::filesystem::path output = "results";
};

/// Strict: unknown keys, wrong types and invalid values throw ConfigError.
/// Relative paths resolve against `base_dir`.
RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Checks invariants: referenced files exist, horizon offset >= 1, SLA valid.
void validate_config(const RunConfig& config);

struct Inputs {
    ServiceRepository repo;
    WorkloadTrace trace;
    SlaConstraints sla;
};

/// Loads or synthesizes the repository and trace named by the config.
Inputs load_inputs(const RunConfig& config);

int cmd_simulate(const RunConfig& config, StrategyKind strategy);
int cmd_compare(const RunConfig& config);
int cmd_forecast_eval(const RunConfig& config);

/// Full argument parsing and dispatch; returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace datesso
