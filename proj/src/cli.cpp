#include "datesso/cli.hpp"

#include "datesso/csv.hpp"
#include "datesso/forecaster.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

namespace datesso {

namespace {

using json = nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : obj.items()) {
        if (!allowed.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const json& obj, const char* key, T& target) {
    if (!obj.contains(key)) return;
    try {
        target = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type");
    }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

SlaConstraints make_sla(const RunConfig& config, std::size_t n) {
    const auto& s = config.sla;
    return SlaConstraints::uniform(n, s.local_latency_s, s.local_utilization, s.global_latency_s,
                                   s.global_utilization, s.compute_cost);
}

std::filesystem::path output_dir(const RunConfig& config) {
    if (const char* env = std::getenv("DATESSO_OUT"); env && *env) return env;
    return config.output;
}

}  // namespace

RunConfig parse_config(const std::string& json_text, const std::filesystem::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    reject_unknown(doc, {"repository", "workload", "synthetic", "strategies", "sla", "horizon_offset",
                         "forecaster", "rbc", "seed", "output"},
                   "config");
    RunConfig cfg;
    if (doc.contains("repository")) {
        std::string p;
        read(doc, "repository", p);
        cfg.repository = resolve(base_dir, p);
    }
    if (doc.contains("workload")) {
        std::string p;
        read(doc, "workload", p);
        cfg.workload = resolve(base_dir, p);
    }
    if (doc.contains("synthetic")) {
        const auto& s = doc["synthetic"];
        reject_unknown(s, {"abstract_services", "candidates", "horizon"}, "synthetic");
        read(s, "abstract_services", cfg.synthetic.abstract_services);
        read(s, "candidates", cfg.synthetic.candidates);
        read(s, "horizon", cfg.synthetic.horizon);
    }
    if (doc.contains("strategies")) {
        std::vector<std::string> names;
        read(doc, "strategies", names);
        cfg.strategies.clear();
        for (const auto& name : names) cfg.strategies.push_back(parse_strategy(name));
    }
    if (doc.contains("sla")) {
        const auto& s = doc["sla"];
        reject_unknown(s, {"local_latency_s", "global_latency_s", "local_utilization", "global_utilization",
                           "compute_cost"},
                       "sla");
        read(s, "local_latency_s", cfg.sla.local_latency_s);
        read(s, "global_latency_s", cfg.sla.global_latency_s);
        read(s, "local_utilization", cfg.sla.local_utilization);
        read(s, "global_utilization", cfg.sla.global_utilization);
        read(s, "compute_cost", cfg.sla.compute_cost);
    }
    read(doc, "horizon_offset", cfg.simulation.horizon_offset);
    if (doc.contains("forecaster")) {
        const auto& f = doc["forecaster"];
        reject_unknown(f, {"p_max", "q_max", "refit_every"}, "forecaster");
        read(f, "p_max", cfg.simulation.forecaster.p_max);
        read(f, "q_max", cfg.simulation.forecaster.q_max);
        read(f, "refit_every", cfg.simulation.forecaster.refit_every);
    }
    if (doc.contains("rbc")) {
        const auto& r = doc["rbc"];
        reject_unknown(r, {"regions"}, "rbc");
        read(r, "regions", cfg.simulation.rbc.regions);
    }
    read(doc, "seed", cfg.seed);
    cfg.simulation.rbc.seed = cfg.seed;
    if (doc.contains("output")) {
        std::string p;
        read(doc, "output", p);
        cfg.output = p;
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

void validate_config(const RunConfig& config) {
    if (config.repository && !std::filesystem::is_regular_file(*config.repository)) {
        throw ConfigError("repository file not found: " + config.repository->string());
    }
    if (config.workload && !std::filesystem::is_regular_file(*config.workload)) {
        throw ConfigError("workload file not found: " + config.workload->string());
    }
    if (config.simulation.horizon_offset < 1) throw ConfigError("horizon_offset must be >= 1");
    const auto& f = config.simulation.forecaster;
    if (f.p_max > kMaxArmaOrder || f.q_max > kMaxArmaOrder) {
        throw ConfigError("forecaster orders must not exceed " + std::to_string(kMaxArmaOrder));
    }
    if (config.simulation.rbc.regions < 1) throw ConfigError("rbc.regions must be >= 1");
    if (config.strategies.empty()) throw ConfigError("no strategies configured");
    if (!config.repository || !config.workload) {
        if (config.synthetic.abstract_services < 1 || config.synthetic.candidates < 1) {
            throw ConfigError("synthetic system needs at least one service and one candidate");
        }
        if (!config.workload && config.synthetic.horizon < 3) throw ConfigError("synthetic horizon too short");
    }
    validate_sla(make_sla(config, 1));
}

Inputs load_inputs(const RunConfig& config) {
    validate_config(config);
    Inputs in;
    if (config.repository) {
        in.repo = load_repository(*config.repository);
    } else {
        RepositoryProfile profile;
        profile.candidates = config.synthetic.candidates;
        profile.local_latency = config.sla.local_latency_s;
        in.repo = generate_synthetic_repository(config.seed + 1, config.synthetic.abstract_services, profile);
    }
    if (config.workload) {
        in.trace = load_workload(*config.workload);
    } else {
        in.trace = generate_synthetic_trace(config.seed, config.synthetic.horizon, in.repo.abstract_count());
    }
    if (in.trace.abstract_count() != in.repo.abstract_count()) {
        throw ConfigError("workload has " + std::to_string(in.trace.abstract_count()) +
                          " services but the repository has " + std::to_string(in.repo.abstract_count()));
    }
    in.sla = make_sla(config, in.repo.abstract_count());
    return in;
}

// =============================================================================
// Commands
// =============================================================================

namespace {

/// Maps exceptions onto exit codes with a diagnostic on stderr.
template <typename Body>
int guarded(const char* command, Body&& body) {
    try {
        return body();
    } catch (const ConfigError& e) {
        std::cerr << command << ": config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IngestError& e) {
        std::cerr << command << ": input error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << command << ": error: " << e.what() << '\n';
        return kExitRuntime;
    }
}

}  // namespace

int cmd_simulate(const RunConfig& config, StrategyKind strategy) {
    return guarded("simulate", [&] {
        const auto in = load_inputs(config);
        const auto result = run(strategy, in.repo, in.trace, in.sla, config.simulation);
        const auto dir = output_dir(config) / result.label;
        write_result(result, dir);
        std::cout << result.label << ": adaptations=" << result.adaptations << " violations=" << result.violations()
                  << " final_debt=" << csv::format(result.final_debt()) << " -> " << dir.string() << '\n';
        return kExitOk;
    });
}

int cmd_compare(const RunConfig& config) {
    return guarded("compare", [&] {
        if (config.strategies.size() < 2) throw ConfigError("compare needs at least two strategies");
        const auto in = load_inputs(config);
        const auto report = compare(config.strategies, in.repo, in.trace, in.sla, config.simulation);
        const auto dir = output_dir(config);
        write_report(report, dir);
        for (std::size_t i = 0; i < report.results.size(); ++i) {
            const auto& r = report.results[i];
            std::cout << r.label << ": S=" << csv::format(r.s_total) << " V=" << r.violations()
                      << " debt=" << csv::format(r.final_debt()) << " score="
                      << (report.scores[i] ? csv::format(*report.scores[i]) : std::string("n/a")) << '\n';
        }
        std::cout << "wrote " << (dir / "comparison.json").string() << '\n';
        return kExitOk;
    });
}

int cmd_forecast_eval(const RunConfig& config) {
    return guarded("forecast-eval", [&] {
        const auto in = load_inputs(config);
        const std::size_t horizon = in.trace.horizon();
        const std::size_t start = training_length(horizon);
        if (start < kMinGphLength || start >= horizon) {
            throw ConfigError("trace of " + std::to_string(horizon) + " timesteps is too short to split");
        }
        const auto dir = output_dir(config) / "forecast_eval";
        std::filesystem::create_directories(dir);

        json summary;
        summary["training_rows"] = start;
        summary["test_rows"] = horizon - start;
        summary["services"] = json::array();
        double se = 0.0, ae = 0.0, naive_se = 0.0;
        std::size_t count = 0;
        for (std::size_t x = 0; x < in.trace.abstract_count(); ++x) {
            const auto series = in.trace.column(x);
            const auto model = fit_auto(std::span<const double>(series).first(start),
                                        config.simulation.forecaster.p_max, config.simulation.forecaster.q_max);
            ArfimaPredictor predictor(model);
            for (std::size_t t = 0; t < start; ++t) predictor.observe(series[t]);

            std::ofstream out(dir / ("service_" + std::to_string(x) + ".csv"), std::ios::binary);
            out << "timestep,actual,predicted,abs_error\n";
            double s_se = 0.0, s_ae = 0.0, s_naive = 0.0;
            for (std::size_t t = start; t < horizon; ++t) {
                const double predicted = predictor.predict(1).front();
                const double err = series[t] - predicted;
                const double naive_err = series[t] - series[t - 1];
                s_se += err * err;
                s_ae += std::abs(err);
                s_naive += naive_err * naive_err;
                out << t << ',' << csv::format(series[t]) << ',' << csv::format(predicted) << ','
                    << csv::format(std::abs(err)) << '\n';
                predictor.observe(series[t]);
            }
            const auto m = static_cast<double>(horizon - start);
            summary["services"].push_back({{"abstract_index", x},
                                           {"p", model.p},
                                           {"d", model.d},
                                           {"q", model.q},
                                           {"rmse", std::sqrt(s_se / m)},
                                           {"mae", s_ae / m},
                                           {"naive_rmse", std::sqrt(s_naive / m)}});
            se += s_se;
            ae += s_ae;
            naive_se += s_naive;
            count += horizon - start;
        }
        const auto total = static_cast<double>(count);
        summary["rmse"] = std::sqrt(se / total);
        summary["mae"] = ae / total;
        summary["naive_rmse"] = std::sqrt(naive_se / total);
        std::ofstream(dir / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
        std::cout << "rmse=" << csv::format(summary["rmse"].get<double>())
                  << " mae=" << csv::format(summary["mae"].get<double>())
                  << " naive_rmse=" << csv::format(summary["naive_rmse"].get<double>()) << '\n';
        return kExitOk;
    });
}

// =============================================================================
// Argument parsing
// =============================================================================

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Debt-aware runtime service composition simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string strategy = "datesso";
    std::string strategies;
    std::size_t horizon = 7200, services = 10, candidates = 10;
    std::string repo_out;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--seed", seed, "Seed for synthetic inputs and clustering");
        sub->add_option("--out", out, "Output directory (DATESSO_OUT overrides)");
    };
    auto* simulate = app.add_subcommand("simulate", "Replay the trace under one strategy");
    add_common(simulate);
    simulate->add_option("--strategy", strategy, "datesso | tlhca | doa | rbc");
    auto* compare_cmd = app.add_subcommand("compare", "Run several strategies and compare them");
    add_common(compare_cmd);
    compare_cmd->add_option("--strategies", strategies, "Comma-separated strategy list");
    auto* eval = app.add_subcommand("forecast-eval", "Forecast accuracy on the test split");
    add_common(eval);
    auto* gen = app.add_subcommand("gen-trace", "Write a synthetic workload trace");
    add_common(gen);
    gen->add_option("--horizon", horizon, "Timesteps")->check(CLI::PositiveNumber);
    gen->add_option("--services", services, "Abstract services")->check(CLI::PositiveNumber);
    gen->add_option("--candidates", candidates, "Candidates per service (with --repo-out)")->check(CLI::PositiveNumber);
    gen->add_option("--repo-out", repo_out, "Also write a synthetic repository CSV here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    RunConfig config;
    try {
        if (!config_path.empty()) config = load_config(config_path);
        if (seed) {
            config.seed = *seed;
            config.simulation.rbc.seed = *seed;
        }
        if (!out.empty()) config.output = out;
        if (!strategies.empty()) {
            config.strategies.clear();
            std::stringstream list(strategies);
            for (std::string name; std::getline(list, name, ',');) config.strategies.push_back(parse_strategy(csv::trim(name)));
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }

    if (simulate->parsed()) {
        StrategyKind kind{};
        try {
            kind = parse_strategy(strategy);
        } catch (const ConfigError& e) {
            std::cerr << "config error: " << e.what() << '\n';
            return kExitConfig;
        }
        return cmd_simulate(config, kind);
    }
    if (compare_cmd->parsed()) return cmd_compare(config);
    if (eval->parsed()) return cmd_forecast_eval(config);

    return guarded("gen-trace", [&] {
        const auto dir = output_dir(config);
        std::filesystem::create_directories(dir);
        const auto trace = generate_synthetic_trace(config.seed, horizon, services);
        save_workload(trace, dir / "workload.csv");
        if (!repo_out.empty()) {
            RepositoryProfile profile;
            profile.candidates = candidates;
            profile.local_latency = config.sla.local_latency_s;
            save_repository(generate_synthetic_repository(config.seed + 1, services, profile), repo_out);
        }
        std::cout << "wrote " << (dir / "workload.csv").string() << '\n';
        return kExitOk;
    });
}

}  // namespace datesso
