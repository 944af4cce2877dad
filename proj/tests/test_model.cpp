#include "datesso/model.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace datesso;
using testsupport::service;

namespace {

const char* kRepoCsv =
    "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n"
    "0,a0,50,0.5,5\n"
    "0,a1,40,0.3,2.5\n"
    "1,b0,100,0.9,0\n";

}  // namespace

TEST(Repository, ParsesCanonicalCsvInOrder) {
    std::istringstream in(kRepoCsv);
    const auto repo = parse_repository(in);
    ASSERT_EQ(repo.abstract_count(), 2u);
    EXPECT_EQ(repo.service_count(), 3u);
    EXPECT_EQ(repo.at(0, 1).id, "a1");
    EXPECT_EQ(repo.at(0, 0).capacity_requests, 50);
    EXPECT_DOUBLE_EQ(repo.at(0, 0).capacity_latency, 0.5);
    EXPECT_DOUBLE_EQ(repo.at(0, 0).overhead, 5.0);
    EXPECT_EQ(repo.find(1, "b0"), 0u);
    EXPECT_EQ(repo.find(1, "a0"), ServiceRepository::npos);
    EXPECT_EQ(repo.max_candidates(), 2u);
    EXPECT_DOUBLE_EQ(repo.max_overhead(), 5.0);
}

TEST(Repository, PerRequestTime) {
    EXPECT_DOUBLE_EQ(service("s", 0, 50, 0.5).per_request_time(), 0.01);
}

TEST(Repository, RejectsBadInput) {
    const std::vector<std::string> bad = {
        "",
        "index,id,t,l,o\n0,a,1,1,1\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,0,0.5,1\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,5,-0.5,1\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,5,0.5,-1\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,5,0.5\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,5,0.5,1\n0,a,6,0.5,1\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,5,0.5,1\n2,c,5,0.5,1\n",
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n",
    };
    for (const auto& text : bad) {
        std::istringstream in(text);
        EXPECT_THROW(parse_repository(in), IngestError) << text;
    }
}

TEST(Repository, ErrorsCarryLineNumbers) {
    std::istringstream in(
        "abstract_index,service_id,capacity_requests,capacity_latency_s,overhead_s\n0,a,5,0.5,1\n0,a,6,0.5,1\n");
    try {
        parse_repository(in, "repo.csv");
        FAIL();
    } catch (const IngestError& e) {
        EXPECT_NE(std::string(e.what()).find("repo.csv:3"), std::string::npos) << e.what();
    }
}

TEST(Repository, ConstructorValidates) {
    EXPECT_THROW(ServiceRepository(std::vector<std::vector<ComponentService>>{}), ConfigError);
    EXPECT_THROW(ServiceRepository(std::vector<std::vector<ComponentService>>{{}}), ConfigError);
    EXPECT_THROW(ServiceRepository({{service("a", 1, 5, 0.1)}}), ConfigError);
    EXPECT_THROW(ServiceRepository({{service("a", 0, 5, 0.1)}, {service("a", 1, 5, 0.1)}}), ConfigError);
}

TEST(Repository, SaveLoadRoundTrip) {
    const auto dir = testsupport::temp_dir("repo_roundtrip");
    const auto repo = generate_synthetic_repository(5, 3);
    save_repository(repo, dir / "repo.csv");
    const auto back = load_repository(dir / "repo.csv");
    ASSERT_EQ(back.abstract_count(), repo.abstract_count());
    for (std::size_t x = 0; x < repo.abstract_count(); ++x) {
        ASSERT_EQ(back.candidates(x).size(), repo.candidates(x).size());
        for (std::size_t y = 0; y < repo.candidates(x).size(); ++y) {
            EXPECT_EQ(back.at(x, y).id, repo.at(x, y).id);
            EXPECT_EQ(back.at(x, y).capacity_latency, repo.at(x, y).capacity_latency);
            EXPECT_EQ(back.at(x, y).overhead, repo.at(x, y).overhead);
        }
    }
}

TEST(Plan, InitialAndValidation) {
    std::istringstream in(kRepoCsv);
    const auto repo = parse_repository(in);
    const auto plan = CompositionPlan::initial(repo);
    EXPECT_EQ(plan.selection, (std::vector<std::size_t>{0, 0}));
    EXPECT_EQ(plan_ids(repo, plan), (std::vector<std::string>{"a0", "b0"}));
    EXPECT_THROW(validate_plan(repo, CompositionPlan{{0}}), std::invalid_argument);
    EXPECT_THROW(validate_plan(repo, CompositionPlan{{0, 1}}), std::invalid_argument);
    EXPECT_NO_THROW(validate_plan(repo, CompositionPlan{{1, 0}}));
}

TEST(Sla, DefaultsAndValidation) {
    const auto sla = SlaConstraints::defaults(3);
    EXPECT_EQ(sla.abstract_count(), 3u);
    EXPECT_DOUBLE_EQ(sla.local_latency[2], 0.09);
    EXPECT_DOUBLE_EQ(sla.local_utilization[0], 0.8);
    EXPECT_DOUBLE_EQ(sla.global_latency, 1.0);
    EXPECT_DOUBLE_EQ(sla.global_utilization, 0.9);
    EXPECT_DOUBLE_EQ(sla.compute_cost, 0.0025);
    EXPECT_NO_THROW(validate_sla(sla));
    auto bad = sla;
    bad.local_utilization[1] = 1.5;
    EXPECT_THROW(validate_sla(bad), ConfigError);
    bad = sla;
    bad.global_latency = 0.0;
    EXPECT_THROW(validate_sla(bad), ConfigError);
}

TEST(Workload, ParsesAndRejects) {
    std::istringstream ok("timestep,w_0,w_1\n0,10,20\n1,11,21\n");
    const auto trace = parse_workload(ok);
    EXPECT_EQ(trace.horizon(), 2u);
    EXPECT_EQ(trace.abstract_count(), 2u);
    EXPECT_EQ(trace.at(1, 0), 11);
    EXPECT_EQ(trace.column(1), (std::vector<double>{20, 21}));

    const std::vector<std::string> bad = {
        "time,w_0\n0,1\n",
        "timestep,w_1\n0,1\n",
        "timestep,w_0\n1,1\n",
        "timestep,w_0\n0,1\n2,1\n",
        "timestep,w_0,w_1\n0,1\n",
        "timestep,w_0\n0,-3\n",
        "timestep,w_0\n0,1.5\n",
        "timestep,w_0\n",
    };
    for (const auto& text : bad) {
        std::istringstream in(text);
        EXPECT_THROW(parse_workload(in), IngestError) << text;
    }
}

TEST(Workload, SaveLoadRoundTrip) {
    const auto dir = testsupport::temp_dir("trace_roundtrip");
    const auto trace = generate_synthetic_trace(9, 300, 4);
    save_workload(trace, dir / "w.csv");
    EXPECT_EQ(load_workload(dir / "w.csv"), trace);
}

TEST(Synthetic, TraceIsDeterministicAndNonNegative) {
    const auto a = generate_synthetic_trace(11, 2000, 5);
    const auto b = generate_synthetic_trace(11, 2000, 5);
    const auto c = generate_synthetic_trace(12, 2000, 5);
    EXPECT_EQ(a, b);
    EXPECT_FALSE(a == c);
    for (Workload w : a.data()) EXPECT_GE(w, 0);
}

TEST(Synthetic, BurstsRaiseTheLoad) {
    BurstProfile calm;
    calm.burst_rate = 0.0;
    BurstProfile bursty;
    bursty.burst_rate = 0.02;
    const auto a = generate_synthetic_trace(3, 3000, 2, calm);
    const auto b = generate_synthetic_trace(3, 3000, 2, bursty);
    double sa = 0, sb = 0;
    for (Workload w : a.data()) sa += static_cast<double>(w);
    for (Workload w : b.data()) sb += static_cast<double>(w);
    EXPECT_GT(sb, sa);
}

TEST(Synthetic, RepositoryCoversTheConfiguredLoadRange) {
    RepositoryProfile profile;
    const auto repo = generate_synthetic_repository(4, 3, profile);
    EXPECT_EQ(repo.abstract_count(), 3u);
    for (std::size_t x = 0; x < 3; ++x) {
        ASSERT_EQ(repo.candidates(x).size(), profile.candidates);
        double lo = 1e300, hi = 0;
        for (const auto& s : repo.candidates(x)) {
            const double load = profile.local_latency / s.per_request_time();
            lo = std::min(lo, load);
            hi = std::max(hi, load);
            EXPECT_GE(s.overhead, profile.overhead_min);
            EXPECT_LE(s.overhead, profile.overhead_max);
        }
        EXPECT_NEAR(lo, profile.load_low, 0.04 * profile.load_low);
        EXPECT_NEAR(hi, profile.load_high, 0.04 * profile.load_high);
    }
}
