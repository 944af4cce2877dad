#include "datesso/simulator.hpp"

#include "datesso/csv.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace datesso {

std::size_t training_length(std::size_t horizon) {
    return static_cast<std::size_t>(std::floor(2.0 * static_cast<double>(horizon) / 3.0 + 1e-9));
}

// =============================================================================
// Forecast table
// =============================================================================

ForecastTable::ForecastTable(std::size_t start, std::size_t end, std::size_t abstract_count,
                             std::size_t steps)
    : start_(start), end_(end), n_(abstract_count), steps_(steps),
      values_((end - start) * abstract_count * steps, 0.0) {
    if (end < start) throw std::invalid_argument("forecast table: end before start");
}

ForecastWindow ForecastTable::window(std::size_t n) const {
    if (n < start_ || n >= end_) throw std::out_of_range("forecast table: timestep outside test split");
    std::vector<Workload> values(steps_ * n_);
    for (std::size_t k = 0; k < steps_; ++k) {
        for (std::size_t x = 0; x < n_; ++x) values[k * n_ + x] = round_half_up(at(n, x, k));
    }
    return ForecastWindow(steps_, n_, std::move(values));
}

namespace {

void check_split(const WorkloadTrace& trace, const SimulationConfig& config) {
    if (config.horizon_offset == 0) throw std::invalid_argument("horizon offset must be >= 1");
    const std::size_t start = training_length(trace.horizon());
    if (start == 0 || start >= trace.horizon()) {
        throw std::invalid_argument("trace of " + std::to_string(trace.horizon()) +
                                    " timesteps is too short to split");
    }
}

ForecastModel fit_or_mean(std::span<const double> train, const ForecasterConfig& cfg,
                          ServiceModelInfo& info) {
    try {
        auto model = fit_auto(train, cfg.p_max, cfg.q_max);
        info = {model.p, model.q, model.d, false, 0};
        return model;
    } catch (const DegenerateSeries&) {
    } catch (const FitError&) {
    }
    const double mean = std::accumulate(train.begin(), train.end(), 0.0) / static_cast<double>(train.size());
    info = {0, 0, 0.0, true, 0};
    return ForecastModel::white_noise(mean);
}

void fill_service(const WorkloadTrace& trace, const SimulationConfig& config, std::size_t x,
                  ForecastTable& table) {
    const std::size_t start = table.start();
    const auto series = trace.column(x);
    auto& info = table.models[x];
    const std::span<const double> all(series);

    ArfimaPredictor predictor(fit_or_mean(all.first(start), config.forecaster, info));
    for (std::size_t t = 0; t < start; ++t) predictor.observe(series[t]);

    const std::size_t every = config.forecaster.refit_every;
    for (std::size_t n = start; n < table.end(); ++n) {
        if (every > 0 && n > start && (n - start) % every == 0) {
            try {
                const auto& old = predictor.model();
                ArfimaPredictor refreshed(fit(all.first(n), old.p, old.q));
                for (std::size_t t = 0; t < n; ++t) refreshed.observe(series[t]);
                predictor = std::move(refreshed);
                info.d = predictor.model().d;
                info.fallback = false;
                ++info.refits;
            } catch (const DegenerateSeries&) {
            } catch (const FitError&) {
            }
        }
        predictor.observe(series[n]);
        const auto predictions = predictor.predict(table.steps());
        for (std::size_t k = 0; k < table.steps(); ++k) table.at(n, x, k) = predictions[k];
    }
}

ForecastTable make_table(const WorkloadTrace& trace, const SimulationConfig& config) {
    check_split(trace, config);
    ForecastTable table(training_length(trace.horizon()), trace.horizon(), trace.abstract_count(),
                        config.horizon_offset);
    table.models.resize(trace.abstract_count());
    return table;
}

}  // namespace

ForecastTable build_forecast_table(const WorkloadTrace& trace, const SimulationConfig& config) {
    auto table = make_table(trace, config);
    const auto count = static_cast<std::ptrdiff_t>(trace.abstract_count());
    // Services write disjoint slices of the table.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t x = 0; x < count; ++x) fill_service(trace, config, static_cast<std::size_t>(x), table);
    return table;
}

ForecastTable build_forecast_table_serial(const WorkloadTrace& trace, const SimulationConfig& config) {
    auto table = make_table(trace, config);
    for (std::size_t x = 0; x < trace.abstract_count(); ++x) fill_service(trace, config, x, table);
    return table;
}

// =============================================================================
// Replay
// =============================================================================

SimulationResult run(StrategyKind kind, const ServiceRepository& repo, const WorkloadTrace& trace,
                     const SlaConstraints& sla, const SimulationConfig& config,
                     const ForecastTable& table) {
    validate_sla(sla);
    const std::size_t n_services = repo.abstract_count();
    if (trace.abstract_count() != n_services || sla.abstract_count() != n_services) {
        throw std::invalid_argument("trace, repository and SLA disagree on the number of abstract services");
    }
    check_split(trace, config);
    const std::size_t start = training_length(trace.horizon());
    const auto strategy = make_strategy(kind, config.rbc);
    if (strategy->uses_forecasts() &&
        (table.start() != start || table.end() != trace.horizon() ||
         table.abstract_count() != n_services || table.steps() != config.horizon_offset)) {
        throw std::invalid_argument("forecast table does not match the trace and config");
    }

    const CostBounds cost = default_cost_bounds(repo, sla);
    const InterestBounds ib = interest_bounds(sla);

    SimulationResult result;
    result.strategy = kind;
    result.label = std::string(strategy_name(kind));
    result.start = start;
    CompositionPlan plan = CompositionPlan::initial(repo);
    result.ledger = DebtLedger(repo, plan, start);
    result.steps.reserve(trace.horizon() - start);

    std::optional<CompositionPlan> pending;
    for (std::size_t t = start; t < trace.horizon(); ++t) {
        if (pending) {
            for (std::size_t x = 0; x < n_services; ++x) {
                const std::size_t y = pending->selection[x];
                if (y == plan.selection[x]) continue;
                const auto& service = repo.at(x, y);
                result.ledger.replace(t, x, service.id, principal(service, sla, cost));
            }
            plan = *pending;
            pending.reset();
        }

        const auto w_row = trace.row(t);
        StepRecord step;
        step.timestep = t;
        bool latency_local = false;
        bool utilization_local = false;
        for (std::size_t x = 0; x < n_services; ++x) {
            const auto obs = observe_local(repo.at(x, plan.selection[x]), w_row[x], sla);
            latency_local |= !obs.latency_ok;
            utilization_local |= !obs.utilization_ok;
            step.utility += obs.utilization - obs.latency_norm;
            result.ledger.accrue(t, x, std::max(0.0, ib.utilization - obs.utilization),
                                 std::max(0.0, obs.latency_norm - ib.latency));
        }
        result.ledger.close_timestep(t);
        step.global = global_observe(repo, plan, w_row, sla);
        step.local_violations = static_cast<std::size_t>(latency_local) + static_cast<std::size_t>(utilization_local);
        step.global_violations = static_cast<std::size_t>(step.global.latency_violated) +
                                 static_cast<std::size_t>(step.global.utilization_violated);
        result.local_violations += step.local_violations;
        result.global_violations += step.global_violations;
        result.global_latency_violations += step.global.latency_violated ? 1 : 0;
        result.global_utilization_violations += step.global.utilization_violated ? 1 : 0;
        result.utility_total += step.utility;

        std::optional<ForecastWindow> window;
        StepContext ctx{repo, sla, cost, plan, trace, t, w_row, nullptr,
                        step.local_violations > 0, step.global_violations > 0};
        if (strategy->triggered(ctx)) {
            const auto began = std::chrono::steady_clock::now();
            if (strategy->uses_forecasts()) {
                window = table.window(t);
                ctx.window = &*window;
            }
            const auto decision = strategy->decide(ctx);
            const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - began;
            result.reasoning_seconds.push_back(elapsed.count());

            step.adapted = true;
            ++result.adaptations;
            result.evaluation_count += decision.evaluation_count;
            if (decision.global_violation) ++result.global_violation_flags;
            for (std::size_t i = 0; i < decision.replaced.size(); ++i) {
                const std::size_t x = decision.replaced[i];
                result.decisions.push_back(DecisionEvent{
                    t, x, repo.at(x, plan.selection[x]).id, repo.at(x, decision.new_plan.selection[x]).id,
                    decision.scores[i], decision.horizon_used, decision.fallback});
            }
            if (decision.new_plan != plan) pending = decision.new_plan;
        }
        result.steps.push_back(step);
    }
    result.final_plan = plan;
    result.s_total = result.utility_total - result.ledger.total_debt();
    return result;
}

SimulationResult run(StrategyKind kind, const ServiceRepository& repo, const WorkloadTrace& trace,
                     const SlaConstraints& sla, const SimulationConfig& config) {
    const auto strategy = make_strategy(kind, config.rbc);
    const ForecastTable table = strategy->uses_forecasts() ? build_forecast_table(trace, config) : ForecastTable{};
    return run(kind, repo, trace, sla, config, table);
}

// =============================================================================
// Comparison
// =============================================================================

namespace {

std::vector<double> metric_series(const SimulationResult& r, const std::string& metric) {
    std::vector<double> out;
    out.reserve(r.steps.size());
    for (const auto& s : r.steps) out.push_back(metric == "global_utilization" ? s.global.utilization : s.global.latency);
    return out;
}

}  // namespace

ComparisonReport compare(const std::vector<StrategyKind>& strategies, const ServiceRepository& repo,
                         const WorkloadTrace& trace, const SlaConstraints& sla,
                         const SimulationConfig& config) {
    if (strategies.size() < 2) throw std::invalid_argument("compare needs at least two strategies");
    const bool any_forecasts = std::any_of(strategies.begin(), strategies.end(), [&](StrategyKind k) {
        return make_strategy(k, config.rbc)->uses_forecasts();
    });
    const ForecastTable table = any_forecasts ? build_forecast_table(trace, config) : ForecastTable{};

    // Runs stay sequential so the per-adaptation timings do not compete for cores.
    ComparisonReport report;
    for (StrategyKind kind : strategies) {
        auto result = run(kind, repo, trace, sla, config, table);
        std::size_t same = 0;
        for (const auto& prior : report.results) same += prior.strategy == kind ? 1 : 0;
        if (same > 0) result.label += "_" + std::to_string(same + 1);
        report.results.push_back(std::move(result));
    }

    std::vector<SustainabilityInput> inputs;
    for (const auto& r : report.results) inputs.push_back({r.s_total, r.violations()});
    try {
        report.scores = sustainability_scores(inputs);
    } catch (const StatisticsError& e) {
        report.scores.assign(report.results.size(), std::nullopt);
        report.score_note = e.what();
    }

    for (const std::string metric : {"global_utilization", "global_latency_s"}) {
        const std::string key = metric == "global_latency_s" ? "global_latency" : metric;
        for (std::size_t i = 0; i < report.results.size(); ++i) {
            for (std::size_t j = i + 1; j < report.results.size(); ++j) {
                PairwiseTest test{metric, report.results[i].label, report.results[j].label, {}, {}};
                const auto a = metric_series(report.results[i], key);
                const auto b = metric_series(report.results[j], key);
                if (a.size() >= kMinKruskalSample && b.size() >= kMinKruskalSample) {
                    test.result = kruskal_wallis({a, b});
                    test.eta2 = eta_squared(test.result->h, test.result->n_total, 2);
                }
                report.tests.push_back(std::move(test));
            }
        }
    }
    return report;
}

// =============================================================================
// Writers
// =============================================================================

void write_timeseries_csv(const SimulationResult& result, std::ostream& out) {
    out << "timestep,global_utilization,global_latency_s,local_violations,global_violations,adapted\n";
    for (const auto& s : result.steps) {
        out << s.timestep << ',' << csv::format(s.global.utilization) << ',' << csv::format(s.global.latency)
            << ',' << s.local_violations << ',' << s.global_violations << ',' << (s.adapted ? 1 : 0) << '\n';
    }
}

void write_decisions_csv(const SimulationResult& result, std::ostream& out) {
    out << "timestep,abstract_index,old_id,new_id,score,horizon_used,fallback_flag,strategy\n";
    for (const auto& d : result.decisions) {
        out << d.timestep << ',' << d.abstract_index << ',' << d.old_id << ',' << d.new_id << ','
            << csv::format(d.score) << ',' << d.horizon_used << ',' << (d.fallback ? 1 : 0) << ','
            << result.label << '\n';
    }
}

void write_reasoning_times_csv(const SimulationResult& result, std::ostream& out) {
    out << "invocation,seconds\n";
    for (std::size_t i = 0; i < result.reasoning_seconds.size(); ++i) {
        out << i << ',' << csv::format(result.reasoning_seconds[i]) << '\n';
    }
}

namespace {

nlohmann::json summary(const SimulationResult& r) {
    return {
        {"strategy", r.label},
        {"test_start", r.start},
        {"timesteps", r.steps.size()},
        {"adaptations", r.adaptations},
        {"evaluation_count", r.evaluation_count},
        {"violations", r.violations()},
        {"local_violations", r.local_violations},
        {"global_violations", r.global_violations},
        {"global_latency_violations", r.global_latency_violations},
        {"global_utilization_violations", r.global_utilization_violations},
        {"global_violation_flags", r.global_violation_flags},
        {"utility_total", r.utility_total},
        {"principal_total", r.ledger.total_principal()},
        {"interest_total", r.ledger.total_interest()},
        {"final_debt", r.final_debt()},
        {"s_total", r.s_total},
        {"final_plan", r.final_plan.selection},
    };
}

void write_file(const std::filesystem::path& path, const auto& writer) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    writer(out);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_summary_json(const SimulationResult& result, std::ostream& out) {
    out << summary(result).dump(2) << '\n';
}

void write_comparison_json(const ComparisonReport& report, std::ostream& out) {
    nlohmann::json doc;
    doc["strategies"] = nlohmann::json::array();
    for (std::size_t i = 0; i < report.results.size(); ++i) {
        auto entry = summary(report.results[i]);
        entry["sustainability"] = report.scores[i] ? nlohmann::json(*report.scores[i]) : nlohmann::json(nullptr);
        if (report.results[i].violations() == 0) entry["sustainability_note"] = "no violations";
        entry["debt_series"] = report.results[i].ledger.series();
        doc["strategies"].push_back(std::move(entry));
    }
    if (!report.score_note.empty()) doc["sustainability_note"] = report.score_note;
    doc["tests"] = nlohmann::json::array();
    for (const auto& t : report.tests) {
        nlohmann::json row{{"metric", t.metric}, {"a", t.a}, {"b", t.b}};
        if (t.result) {
            row["h"] = t.result->h;
            row["p_value"] = t.result->p_value;
            row["eta_squared"] = *t.eta2;
            row["effect"] = effect_label(*t.eta2);
            row["significant"] = t.result->p_value < 0.05;
        } else {
            row["h"] = nullptr;
            row["note"] = "sample too small";
        }
        doc["tests"].push_back(std::move(row));
    }
    out << doc.dump(2) << '\n';
}

void write_result(const SimulationResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_file(dir / "timeseries.csv", [&](std::ostream& o) { write_timeseries_csv(result, o); });
    write_file(dir / "decisions.csv", [&](std::ostream& o) { write_decisions_csv(result, o); });
    write_file(dir / "ledger.csv", [&](std::ostream& o) { write_ledger_csv(result.ledger, o); });
    write_file(dir / "reasoning_times.csv", [&](std::ostream& o) { write_reasoning_times_csv(result, o); });
    write_file(dir / "summary.json", [&](std::ostream& o) { write_summary_json(result, o); });
}

void write_report(const ComparisonReport& report, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& r : report.results) write_result(r, dir / r.label);
    write_file(dir / "comparison.json", [&](std::ostream& o) { write_comparison_json(report, o); });
}

}  // namespace datesso
