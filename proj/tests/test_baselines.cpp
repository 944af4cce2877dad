#include "datesso/baselines.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace datesso;
using testsupport::service;

namespace {

ComponentService sized(std::string id, std::size_t x, double c, double overhead = 0.0) {
    return service(std::move(id), x, 9, 0.09 * 9.0 / c, overhead);
}

WorkloadTrace trace_of(const std::vector<std::vector<Workload>>& rows) {
    std::vector<Workload> flat;
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return WorkloadTrace(rows.size(), rows.front().size(), flat);
}

}  // namespace

TEST(Names, RoundTripAndCaseInsensitive) {
    for (auto k : {StrategyKind::Datesso, StrategyKind::Tlhca, StrategyKind::Doa, StrategyKind::Rbc}) {
        EXPECT_EQ(parse_strategy(strategy_name(k)), k);
    }
    EXPECT_EQ(parse_strategy("DATESSO"), StrategyKind::Datesso);
    EXPECT_EQ(parse_strategy("Rbc"), StrategyKind::Rbc);
    EXPECT_THROW(parse_strategy("greedy"), ConfigError);
}

TEST(Doa, MatchesDebtObliviousOracle) {
    std::mt19937_64 rng(31);
    int checked = 0;
    for (int i = 0; i < 600; ++i) {
        const auto inst = testsupport::random_instance(rng);
        const auto oracle = testsupport::exhaustive_oracle(inst, false);
        if (!oracle.has_plan) continue;
        const ReasonerContext ctx{inst.repo, inst.sla, default_cost_bounds(inst.repo, inst.sla)};
        const auto d = doa_reason(ctx, inst.plan, inst.n, inst.w_now, inst.window);
        EXPECT_NE(std::find(oracle.ties.begin(), oracle.ties.end(), d.new_plan), oracle.ties.end());
        ++checked;
    }
    EXPECT_GT(checked, 100);
}

TEST(Doa, EqualsDatessoWithoutDebt) {
    // No overheads and utilization bound 0: principal and alpha vanish; a
    // global latency bound of N * CL keeps beta at zero for feasible picks.
    std::mt19937_64 rng(32);
    for (int i = 0; i < 300; ++i) {
        auto inst = testsupport::random_instance(rng);
        std::vector<std::vector<ComponentService>> cands;
        for (std::size_t x = 0; x < inst.repo.abstract_count(); ++x) {
            auto row = std::vector<ComponentService>(inst.repo.candidates(x).begin(), inst.repo.candidates(x).end());
            for (auto& s : row) s.overhead = 0.0;
            cands.push_back(std::move(row));
        }
        inst.repo = ServiceRepository(std::move(cands));
        inst.sla.global_utilization = 0.0;
        inst.sla.global_latency = 0.09 * static_cast<double>(inst.sla.abstract_count());
        const ReasonerContext ctx{inst.repo, inst.sla, default_cost_bounds(inst.repo, inst.sla)};
        const auto a = reason(ctx, inst.plan, inst.n, inst.w_now, inst.window);
        const auto b = doa_reason(ctx, inst.plan, inst.n, inst.w_now, inst.window);
        EXPECT_EQ(a.new_plan, b.new_plan);
        EXPECT_EQ(a.horizon_used, b.horizon_used);
    }
}

TEST(Tlhca, LocalOnlyWhenGlobalHolds) {
    const ServiceRepository repo({{sized("a", 0, 60), sized("b", 0, 100)}, {sized("c", 1, 100)}});
    const auto sla = SlaConstraints::defaults(2);
    const ReasonerContext ctx{repo, sla, default_cost_bounds(repo, sla)};
    const std::vector<Workload> w{95, 95};
    const ForecastWindow window(1, 2, {95, 95});
    const auto d = tlhca_reason(ctx, CompositionPlan::initial(repo), 0, w, window);
    EXPECT_EQ(d.replaced, (std::vector<std::size_t>{0}));
    EXPECT_EQ(d.new_plan.selection, (std::vector<std::size_t>{1, 0}));
    EXPECT_FALSE(d.global_violation);
}

TEST(Tlhca, RerunsOverAllServicesOnGlobalBreach) {
    // Only service 0 is locally infeasible. Fixing it leaves the mean
    // utilization at 0.85 < 0.9, so the rerun also moves service 1 to d.
    const ServiceRepository repo({{sized("a", 0, 60), sized("b", 0, 100)},
                                  {sized("c", 1, 100), sized("d", 1, 87)}});
    const auto sla = SlaConstraints::defaults(2);
    const ReasonerContext ctx{repo, sla, default_cost_bounds(repo, sla)};
    const std::vector<Workload> w{85, 85};
    const ForecastWindow window(1, 2, {85, 85});
    const auto first = reason(ctx, CompositionPlan::initial(repo), 0, w, window);
    EXPECT_EQ(first.replaced, (std::vector<std::size_t>{0}));
    const auto d = tlhca_reason(ctx, CompositionPlan::initial(repo), 0, w, window);
    EXPECT_EQ(d.replaced, (std::vector<std::size_t>{0, 1}));
    EXPECT_EQ(d.new_plan.selection, (std::vector<std::size_t>{1, 1}));
    EXPECT_FALSE(d.global_violation);
    EXPECT_GT(d.evaluation_count, first.evaluation_count);
}

TEST(Tlhca, FlagsUnmeetableGlobalBound) {
    const ServiceRepository repo({{sized("a", 0, 60), sized("b", 0, 100)}, {sized("c", 1, 100)}});
    const auto sla = SlaConstraints::defaults(2);
    const ReasonerContext ctx{repo, sla, default_cost_bounds(repo, sla)};
    const std::vector<Workload> w{95, 50};
    const ForecastWindow window(1, 2, {95, 50});
    const auto d = tlhca_reason(ctx, CompositionPlan::initial(repo), 0, w, window);
    EXPECT_TRUE(d.global_violation);
    EXPECT_EQ(d.new_plan.selection[0], 1u);
}

TEST(Regions, DegenerateInputs) {
    EXPECT_TRUE(cluster_regions(std::vector<QosPoint>{}, 3, 1).empty());
    const std::vector<QosPoint> two{{0.9, 0.1}, {0.2, 0.3}};
    const auto r = cluster_regions(two, 5, 1);
    ASSERT_EQ(r.size(), 2u);
    EXPECT_EQ(r[0].members, (std::vector<std::size_t>{0}));
    const std::vector<QosPoint> same(4, QosPoint{0.5, 0.5});
    const auto one = cluster_regions(same, 3, 1);
    ASSERT_EQ(one.size(), 1u);
    EXPECT_EQ(one[0].members.size(), 4u);
}

TEST(Regions, SeparatesClustersAndOrdersByUtilization) {
    std::vector<QosPoint> pts;
    for (int i = 0; i < 5; ++i) pts.push_back({0.2 + 0.01 * i, 0.05});
    for (int i = 0; i < 5; ++i) pts.push_back({0.9 + 0.01 * i, 0.2});
    for (int i = 0; i < 5; ++i) pts.push_back({0.55 + 0.01 * i, 0.1});
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto r = cluster_regions(pts, 3, seed);
        ASSERT_EQ(r.size(), 3u);
        EXPECT_EQ(r[0].members, (std::vector<std::size_t>{5, 6, 7, 8, 9}));
        EXPECT_EQ(r[1].members, (std::vector<std::size_t>{10, 11, 12, 13, 14}));
        EXPECT_EQ(r[2].members, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
        EXPECT_NEAR(r[0].centroid_utilization, 0.92, 1e-12);
    }
    const auto a = cluster_regions(pts, 2, 7);
    const auto b = cluster_regions(pts, 2, 7);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].members, b[i].members);
}

TEST(Regions, CandidateHistoryMeans) {
    const ServiceRepository repo({{sized("a", 0, 100)}});
    const auto sla = SlaConstraints::defaults(1);
    const std::vector<Workload> hist{50, 100, 150};
    const auto pts = candidate_history(repo, 0, hist, sla);
    EXPECT_NEAR(pts[0].utilization, (0.5 + 1.0 + 1.0) / 3.0, 1e-12);
    EXPECT_NEAR(pts[0].latency, (0.5 + 1.0 + 1.0) / 3.0, 1e-12);  // 0.135 s clamps at the 0.09 s bound
}

TEST(Rbc, PicksFeasibleFromBestRegionAndKeepsFeasibleIncumbent) {
    const ServiceRepository repo({{sized("a", 0, 50), sized("b", 0, 100), sized("c", 0, 110), sized("d", 0, 400)},
                                  {sized("e", 1, 100)}});
    const auto sla = SlaConstraints::defaults(2);
    const auto trace = trace_of({{90, 90}, {92, 95}, {95, 95}});
    const auto d = rbc_reason(repo, sla, CompositionPlan::initial(repo), trace, 2);
    EXPECT_FALSE(d.fallback);
    EXPECT_EQ(d.replaced, (std::vector<std::size_t>{0}));
    EXPECT_EQ(d.new_plan.selection[0], 1u);  // b: highest rank among feasible candidates
    EXPECT_EQ(d.new_plan.selection[1], 0u);
    EXPECT_GT(d.evaluation_count, 0u);
}

TEST(Rbc, FallbackIsLeastViolating) {
    const ServiceRepository repo({{sized("a", 0, 20), sized("b", 0, 30)}});
    const auto sla = SlaConstraints::defaults(1);
    const auto trace = trace_of({{90}, {95}});
    const auto d = rbc_reason(repo, sla, CompositionPlan::initial(repo), trace, 1);
    EXPECT_TRUE(d.fallback);
    EXPECT_EQ(d.new_plan.selection[0], 1u);
}

TEST(Strategies, TriggerRules) {
    const ServiceRepository repo({{sized("a", 0, 100)}});
    const auto sla = SlaConstraints::defaults(1);
    const auto plan = CompositionPlan::initial(repo);
    const auto trace = trace_of({{90}});
    const std::vector<Workload> w{90};
    auto ctx = [&](bool local, bool global) {
        return StepContext{repo, sla, default_cost_bounds(repo, sla), plan, trace, 0, w, nullptr, local, global};
    };
    const auto datesso = make_strategy(StrategyKind::Datesso);
    const auto tlhca = make_strategy(StrategyKind::Tlhca);
    const auto doa = make_strategy(StrategyKind::Doa);
    const auto rbc = make_strategy(StrategyKind::Rbc);
    EXPECT_TRUE(datesso->triggered(ctx(true, false)));
    EXPECT_FALSE(datesso->triggered(ctx(false, true)));
    EXPECT_TRUE(doa->triggered(ctx(true, false)));
    EXPECT_FALSE(doa->triggered(ctx(false, true)));
    EXPECT_TRUE(tlhca->triggered(ctx(true, false)));
    EXPECT_TRUE(tlhca->triggered(ctx(false, true)));
    EXPECT_FALSE(tlhca->triggered(ctx(false, false)));
    EXPECT_FALSE(rbc->triggered(ctx(true, false)));
    EXPECT_TRUE(rbc->triggered(ctx(false, true)));
    EXPECT_FALSE(rbc->uses_forecasts());
    EXPECT_TRUE(datesso->uses_forecasts());
    EXPECT_EQ(rbc->kind(), StrategyKind::Rbc);
    EXPECT_THROW(datesso->decide(ctx(true, false)), std::logic_error);
}
