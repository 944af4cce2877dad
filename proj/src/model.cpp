#include "datesso/model.hpp"

#include "datesso/csv.hpp"
#include "datesso/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace datesso {

// =============================================================================
// Domain types
// =============================================================================

void validate_service(const ComponentService& s) {
    if (s.id.empty()) throw ConfigError("component service with empty id");
    if (s.capacity_requests < 1) {
        throw ConfigError("service " + s.id + ": capacity_requests must be >= 1");
    }
    if (!(s.capacity_latency > 0.0) || !std::isfinite(s.capacity_latency)) {
        throw ConfigError("service " + s.id + ": capacity_latency must be > 0");
    }
    if (!(s.overhead >= 0.0) || !std::isfinite(s.overhead)) {
        throw ConfigError("service " + s.id + ": overhead must be >= 0");
    }
    const double per_request = s.per_request_time();
    if (!(per_request > 0.0) || !std::isfinite(per_request)) {
        throw ConfigError("service " + s.id + ": per-request time is not finite and positive");
    }
}

ServiceRepository::ServiceRepository(std::vector<std::vector<ComponentService>> candidates)
    : candidates_(std::move(candidates)) {
    if (candidates_.empty()) throw ConfigError("repository has no abstract services");
    std::set<std::string> ids;
    for (std::size_t x = 0; x < candidates_.size(); ++x) {
        if (candidates_[x].empty()) {
            throw ConfigError("abstract service " + std::to_string(x) + " has no candidates");
        }
        for (const auto& s : candidates_[x]) {
            validate_service(s);
            if (s.abstract_index != x) {
                throw ConfigError("service " + s.id + " listed under abstract index " +
                                  std::to_string(x) + " but declares " +
                                  std::to_string(s.abstract_index));
            }
            if (!ids.insert(s.id).second) throw ConfigError("duplicate service id " + s.id);
        }
    }
}

std::size_t ServiceRepository::service_count() const {
    std::size_t total = 0;
    for (const auto& c : candidates_) total += c.size();
    return total;
}

std::size_t ServiceRepository::find(std::size_t abstract_index, const std::string& id) const {
    const auto& list = candidates_.at(abstract_index);
    for (std::size_t y = 0; y < list.size(); ++y) {
        if (list[y].id == id) return y;
    }
    return npos;
}

std::size_t ServiceRepository::max_candidates() const {
    std::size_t best = 0;
    for (const auto& c : candidates_) best = std::max(best, c.size());
    return best;
}

double ServiceRepository::max_overhead() const {
    double best = 0.0;
    for (const auto& c : candidates_) {
        for (const auto& s : c) best = std::max(best, s.overhead);
    }
    return best;
}

CompositionPlan CompositionPlan::initial(const ServiceRepository& repo) {
    return CompositionPlan{std::vector<std::size_t>(repo.abstract_count(), 0)};
}

void validate_plan(const ServiceRepository& repo, const CompositionPlan& plan) {
    if (plan.size() != repo.abstract_count()) {
        throw std::invalid_argument("plan has " + std::to_string(plan.size()) +
                                    " selections for " + std::to_string(repo.abstract_count()) +
                                    " abstract services");
    }
    for (std::size_t x = 0; x < plan.size(); ++x) {
        if (plan.selection[x] >= repo.candidates(x).size()) {
            throw std::invalid_argument("plan selects unknown candidate for abstract service " +
                                        std::to_string(x));
        }
    }
}

std::vector<std::string> plan_ids(const ServiceRepository& repo, const CompositionPlan& plan) {
    std::vector<std::string> ids;
    ids.reserve(plan.size());
    for (std::size_t x = 0; x < plan.size(); ++x) ids.push_back(repo.at(x, plan.selection[x]).id);
    return ids;
}

SlaConstraints SlaConstraints::uniform(std::size_t n, double local_latency,
                                       double local_utilization, double global_latency,
                                       double global_utilization, double compute_cost) {
    SlaConstraints sla;
    sla.local_latency.assign(n, local_latency);
    sla.local_utilization.assign(n, local_utilization);
    sla.global_latency = global_latency;
    sla.global_utilization = global_utilization;
    sla.compute_cost = compute_cost;
    return sla;
}

SlaConstraints SlaConstraints::defaults(std::size_t n) {
    return uniform(n, 0.09, 0.8, 1.0, 0.9, 0.0025);
}

void validate_sla(const SlaConstraints& sla) {
    if (sla.local_latency.empty()) throw ConfigError("SLA has no abstract services");
    if (sla.local_latency.size() != sla.local_utilization.size()) {
        throw ConfigError("SLA local latency/utilization bound counts differ");
    }
    for (double cl : sla.local_latency) {
        if (!(cl > 0.0)) throw ConfigError("local latency bound must be > 0");
    }
    for (double cu : sla.local_utilization) {
        if (!(cu > 0.0 && cu <= 1.0)) throw ConfigError("local utilization bound must be in (0, 1]");
    }
    if (!(sla.global_latency > 0.0)) throw ConfigError("global latency bound must be > 0");
    if (!(sla.global_utilization > 0.0 && sla.global_utilization <= 1.0)) {
        throw ConfigError("global utilization bound must be in (0, 1]");
    }
    if (!(sla.compute_cost >= 0.0)) throw ConfigError("compute cost must be >= 0");
}

WorkloadTrace::WorkloadTrace(std::size_t horizon, std::size_t abstract_count,
                             std::vector<Workload> demand)
    : horizon_(horizon), n_(abstract_count), demand_(std::move(demand)) {
    if (horizon_ == 0 || n_ == 0) throw ConfigError("workload trace must be non-empty");
    if (demand_.size() != horizon_ * n_) throw ConfigError("workload matrix has wrong size");
    if (std::any_of(demand_.begin(), demand_.end(), [](Workload w) { return w < 0; })) {
        throw ConfigError("workload entries must be >= 0");
    }
}

std::vector<double> WorkloadTrace::column(std::size_t x, std::size_t begin, std::size_t end) const {
    std::vector<double> out;
    out.reserve(end - begin);
    for (std::size_t t = begin; t < end; ++t) out.push_back(static_cast<double>(at(t, x)));
    return out;
}

// =============================================================================
// Ingestion
// =============================================================================

namespace {

constexpr std::string_view kRepositoryHeader =
    "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s";

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& what) {
    throw IngestError(source + ":" + std::to_string(line) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write " + path.string());
    return out;
}

}  // namespace

ServiceRepository parse_repository(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) fail(source, 1, "missing header");
    ++line_no;
    if (csv::trim(line) != kRepositoryHeader) {
        fail(source, line_no, "expected header '" + std::string(kRepositoryHeader) + "'");
    }

    std::vector<std::vector<ComponentService>> groups;
    std::set<std::string> ids;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split(line);
        if (fields.size() != 5) fail(source, line_no, "expected 5 fields");
        const auto x = csv::parse_int(fields[0]);
        const auto id = csv::trim(fields[1]);
        const auto t = csv::parse_int(fields[2]);
        const auto l = csv::parse_double(fields[3]);
        const auto o = csv::parse_double(fields[4]);
        if (!x || *x < 0) fail(source, line_no, "bad abstract_index");
        if (id.empty()) fail(source, line_no, "empty service_id");
        if (!t || *t < 1) fail(source, line_no, "capacity_requests must be a positive integer");
        if (!l || *l <= 0.0) fail(source, line_no, "capacity_latency_s must be positive");
        if (!o || *o < 0.0) fail(source, line_no, "overhead_s must be non-negative");
        if (!ids.insert(std::string(id)).second) {
            fail(source, line_no, "duplicate service_id '" + std::string(id) + "'");
        }
        const auto index = static_cast<std::size_t>(*x);
        if (index >= groups.size()) groups.resize(index + 1);
        groups[index].push_back(ComponentService{std::string(id), index, *t, *l, *o});
    }
    if (groups.empty()) fail(source, line_no, "repository has no services");
    for (std::size_t x = 0; x < groups.size(); ++x) {
        if (groups[x].empty()) {
            fail(source, line_no, "abstract service " + std::to_string(x) + " has no candidates");
        }
    }
    return ServiceRepository(std::move(groups));
}

ServiceRepository load_repository(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_repository(in, path.string());
}

void save_repository(const ServiceRepository& repo, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << kRepositoryHeader << '\n';
    for (std::size_t x = 0; x < repo.abstract_count(); ++x) {
        for (const auto& s : repo.candidates(x)) {
            out << x << ',' << s.id << ',' << s.capacity_requests << ','
                << csv::format(s.capacity_latency) << ',' << csv::format(s.overhead) << '\n';
        }
    }
}

WorkloadTrace parse_workload(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line)) fail(source, 1, "missing header");
    const auto header = csv::split(csv::trim(line));
    if (header.size() < 2 || csv::trim(header[0]) != "timestep") {
        fail(source, line_no, "expected header 'timestep,w_0,...'");
    }
    const std::size_t n = header.size() - 1;
    for (std::size_t x = 0; x < n; ++x) {
        if (csv::trim(header[x + 1]) != "w_" + std::to_string(x)) {
            fail(source, line_no, "expected column w_" + std::to_string(x));
        }
    }

    std::vector<Workload> demand;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (csv::trim(line).empty()) continue;
        const auto fields = csv::split(line);
        if (fields.size() != n + 1) {
            fail(source, line_no, "expected " + std::to_string(n + 1) + " fields (ragged row)");
        }
        const auto t = csv::parse_int(fields[0]);
        if (!t || *t != static_cast<std::int64_t>(rows)) {
            fail(source, line_no, "timestep must be contiguous from 0 (expected " +
                                      std::to_string(rows) + ")");
        }
        for (std::size_t x = 0; x < n; ++x) {
            const auto w = csv::parse_int(fields[x + 1]);
            if (!w) fail(source, line_no, "non-integer demand");
            if (*w < 0) fail(source, line_no, "negative demand");
            demand.push_back(*w);
        }
        ++rows;
    }
    if (rows == 0) fail(source, line_no, "trace has no rows");
    return WorkloadTrace(rows, n, std::move(demand));
}

WorkloadTrace load_workload(const std::filesystem::path& path) {
    auto in = open_input(path);
    return parse_workload(in, path.string());
}

void save_workload(const WorkloadTrace& trace, const std::filesystem::path& path) {
    auto out = open_output(path);
    out << "timestep";
    for (std::size_t x = 0; x < trace.abstract_count(); ++x) out << ",w_" << x;
    out << '\n';
    for (std::size_t t = 0; t < trace.horizon(); ++t) {
        out << t;
        for (Workload w : trace.row(t)) out << ',' << w;
        out << '\n';
    }
}

// =============================================================================
// Synthetic data
// =============================================================================

WorkloadTrace generate_synthetic_trace(std::uint64_t seed, std::size_t horizon, std::size_t n,
                                       const BurstProfile& profile) {
    if (horizon < 1 || n < 1) throw ConfigError("synthetic trace needs horizon >= 1 and n >= 1");
    if (std::abs(profile.noise_memory) >= 0.5) throw ConfigError("noise_memory must be in (-0.5, 0.5)");
    if (!(profile.period > 0.0)) throw ConfigError("period must be > 0");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Composition-wide bursts: every abstract service sees the same spikes.
    std::vector<double> burst(horizon, 0.0);
    double level = 0.0;
    for (std::size_t t = 0; t < horizon; ++t) {
        level *= profile.burst_decay;
        if (profile.burst_amplitude > 0.0 && unit(rng) < profile.burst_rate) {
            level += profile.burst_amplitude * (0.5 + unit(rng));
        }
        burst[t] = level;
    }

    const auto weights =
        kernels::frac_weights(-profile.noise_memory, std::min<std::size_t>(horizon, 1000));
    std::vector<Workload> demand(horizon * n);
    std::vector<double> innovations(horizon);
    for (std::size_t x = 0; x < n; ++x) {
        const double scale = 1.0 + profile.service_spread * (2.0 * unit(rng) - 1.0);
        const double phase = 0.25 * std::numbers::pi * (2.0 * unit(rng) - 1.0);
        for (auto& e : innovations) e = profile.noise_sd * normal(rng);
        const auto noise = kernels::frac_diff(innovations, weights);
        for (std::size_t t = 0; t < horizon; ++t) {
            const double cycle =
                0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * static_cast<double>(t) /
                                         profile.period + phase);
            const double value =
                scale * (profile.base_load + profile.diurnal_amplitude * cycle + burst[t]) +
                noise[t];
            demand[t * n + x] = static_cast<Workload>(std::llround(std::max(0.0, value)));
        }
    }
    return WorkloadTrace(horizon, n, std::move(demand));
}

ServiceRepository generate_synthetic_repository(std::uint64_t seed, std::size_t n,
                                                const RepositoryProfile& profile) {
    if (n < 1 || profile.candidates < 1) throw ConfigError("synthetic repository must be non-empty");
    if (!(profile.load_low > 0.0 && profile.load_high >= profile.load_low)) {
        throw ConfigError("synthetic repository load range must satisfy 0 < low <= high");
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> requests(20, 200);

    const std::size_t y_count = profile.candidates;
    const double ratio = y_count > 1 ? std::pow(profile.load_high / profile.load_low,
                                                1.0 / static_cast<double>(y_count - 1))
                                     : 1.0;
    std::vector<std::vector<ComponentService>> groups(n);
    for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < y_count; ++y) {
            const double load = profile.load_low * std::pow(ratio, static_cast<double>(y)) *
                                (0.97 + 0.06 * unit(rng));
            ComponentService s;
            s.id = "c" + std::to_string(x) + "_" + std::to_string(y);
            s.abstract_index = x;
            s.capacity_requests = requests(rng);
            s.capacity_latency =
                profile.local_latency * static_cast<double>(s.capacity_requests) / load;
            s.overhead = profile.overhead_min +
                         (profile.overhead_max - profile.overhead_min) * unit(rng);
            groups[x].push_back(std::move(s));
        }
        std::shuffle(groups[x].begin(), groups[x].end(), rng);
    }
    return ServiceRepository(std::move(groups));
}

}  // namespace datesso
