#include "datesso/constraints.hpp"

#include "test_support.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace datesso;
using testsupport::service;

TEST(LocalLatency, RawSeconds) {
    const auto sla = SlaConstraints::defaults(1);
    EXPECT_DOUBLE_EQ(local_latency(service("a", 0, 50, 0.5), 50, sla).raw, 0.5);
    EXPECT_DOUBLE_EQ(local_latency(service("a", 0, 50, 0.5), 0, sla).raw, 0.0);
    EXPECT_NEAR(local_latency(service("a", 0, 50, 0.19), 25, sla).raw, 0.095, 1e-15);
}

TEST(LocalLatency, NormalizedBySharedBoundAndClamped) {
    const auto sla = SlaConstraints::defaults(10);
    EXPECT_DOUBLE_EQ(latency_normalization_bound(sla), 0.9);
    const auto v = local_latency(service("a", 0, 50, 0.09), 50, sla);
    EXPECT_NEAR(v.norm, 0.1, 1e-15);
    EXPECT_DOUBLE_EQ(local_latency(service("a", 0, 1, 10.0), 50, sla).norm, 1.0);
}

TEST(LocalUtilization, Examples) {
    const auto sla = SlaConstraints::defaults(1);
    const auto s = service("a", 0, 50, 0.09);
    EXPECT_DOUBLE_EQ(local_utilization(s, 0, sla), 0.0);
    EXPECT_NEAR(local_utilization(s, 40, sla), 0.8, 1e-15);
    EXPECT_DOUBLE_EQ(local_utilization(s, 100, sla), 1.0);
}

TEST(Feasibility, Examples) {
    auto sla = SlaConstraints::defaults(1);
    const auto s = service("a", 0, 50, 0.09);
    EXPECT_TRUE(is_feasible(s, 45, sla));
    EXPECT_FALSE(is_feasible(s, 0, sla));
    EXPECT_FALSE(is_feasible(s, 51, sla));
    EXPECT_DOUBLE_EQ(violation_magnitude(s, 45, sla), 0.0);
    EXPECT_GT(violation_magnitude(s, 10, sla), 0.0);
    EXPECT_GT(violation_magnitude(s, 80, sla), 0.0);
}

TEST(Feasibility, BoundariesAreInclusive) {
    // T = 1, L = 1: raw = w, utilization = w / CL.
    SlaConstraints sla = SlaConstraints::uniform(1, 4.0, 0.5, 10.0, 0.9, 0.0);
    const auto s = service("a", 0, 1, 1.0);
    EXPECT_TRUE(is_feasible(s, 4, sla));  // latency exactly CL
    EXPECT_TRUE(is_feasible(s, 2, sla));  // utilization exactly CU
    EXPECT_FALSE(is_feasible(s, 1, sla));
    EXPECT_FALSE(is_feasible(s, 5, sla));
    const auto obs = observe_local(s, 5, sla);
    EXPECT_FALSE(obs.latency_ok);
    EXPECT_TRUE(obs.utilization_ok);
    EXPECT_FALSE(obs.feasible);
}

TEST(Global, SumAndMean) {
    const auto sla = SlaConstraints::defaults(10);
    std::vector<std::vector<ComponentService>> cands;
    for (std::size_t x = 0; x < 10; ++x) cands.push_back({service("c" + std::to_string(x), x, 50, 0.09)});
    const ServiceRepository repo(cands);
    const auto plan = CompositionPlan::initial(repo);
    const std::vector<Workload> row(10, 50);
    const auto g = global_observe(repo, plan, row, sla);
    EXPECT_NEAR(g.latency, 0.9, 1e-12);
    EXPECT_FALSE(g.latency_violated);
    EXPECT_DOUBLE_EQ(g.utilization, 1.0);
    EXPECT_FALSE(g.utilization_violated);

    const std::vector<Workload> low(10, 30);
    const auto g2 = global_observe(repo, plan, low, sla);
    EXPECT_NEAR(g2.utilization, 0.6, 1e-12);
    EXPECT_TRUE(g2.utilization_violated);

    const std::vector<Workload> high(10, 60);
    EXPECT_TRUE(global_observe(repo, plan, high, sla).latency_violated);
}

TEST(Global, SingleServiceEqualsLocal) {
    const auto sla = SlaConstraints::defaults(1);
    const ServiceRepository repo({{service("a", 0, 50, 0.09)}});
    const std::vector<Workload> row{42};
    const auto g = global_observe(repo, CompositionPlan::initial(repo), row, sla);
    const auto l = observe_local(repo.at(0, 0), 42, sla);
    EXPECT_DOUBLE_EQ(g.latency, l.latency_raw);
    EXPECT_DOUBLE_EQ(g.utilization, l.utilization);
    EXPECT_DOUBLE_EQ(g.latency_norm, l.latency_norm);
}

TEST(Properties, MonotoneInWorkloadAndScaleInvariant) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<std::int64_t> t_dist(1, 500);
    std::uniform_real_distribution<double> l_dist(0.01, 5.0);
    const auto sla = SlaConstraints::defaults(1);
    for (int i = 0; i < 200; ++i) {
        const auto s = service("a", 0, t_dist(rng), l_dist(rng));
        auto twice = s;
        twice.capacity_requests *= 2;
        twice.capacity_latency *= 2.0;
        double prev_raw = -1.0, prev_u = -1.0;
        for (Workload w = 0; w < 400; w += 7) {
            const auto v = local_latency(s, w, sla);
            const double u = local_utilization(s, w, sla);
            EXPECT_GE(v.raw, prev_raw);
            EXPECT_GE(u, prev_u);
            EXPECT_GE(v.norm, 0.0);
            EXPECT_LE(v.norm, 1.0);
            EXPECT_NEAR(local_latency(twice, w, sla).raw, v.raw, 1e-12 * (1.0 + v.raw));
            EXPECT_NEAR(local_utilization(twice, w, sla), u, 1e-12);
            prev_raw = v.raw;
            prev_u = u;
        }
    }
}

TEST(Properties, GlobalLatencyIsExactSumOfLocalRaw) {
    std::mt19937_64 rng(6);
    for (int i = 0; i < 50; ++i) {
        const auto inst = testsupport::random_instance(rng);
        const auto g = global_observe(inst.repo, inst.plan, inst.w_now, inst.sla);
        double sum = 0.0, norm_sum = 0.0;
        for (std::size_t x = 0; x < inst.plan.size(); ++x) {
            const auto v = local_latency(inst.repo.at(x, inst.plan.selection[x]), inst.w_now[x], inst.sla);
            sum += v.raw;
            norm_sum += v.norm;
        }
        EXPECT_DOUBLE_EQ(g.latency, sum);
        EXPECT_GE(g.utilization, 0.0);
        EXPECT_LE(g.utilization, 1.0);
        if (g.latency_norm < 1.0) EXPECT_NEAR(g.latency_norm, norm_sum, 1e-12);
    }
}
