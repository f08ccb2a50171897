#include <doctest.h>

#include <cmath>

#include "flexq/flexibility.hpp"
#include "flexq/simulate.hpp"
#include "test_util.hpp"

using namespace flexq;

namespace {

ModelParams table_model() {
    ModelParams m;
    m.lambda = 2;
    m.mu_low = 3;
    m.mu_high = 6;
    m.service_cost = 8;
    m.reward = 4;
    m.beta = 1;
    m.holding = HoldingCost::power(1.0, 2.0);
    return m;
}

ThresholdPolicy policy_of(int bs, int bd) {
    ThresholdPolicy p;
    p.b_service = Threshold::finite(bs);
    p.b_admission = Threshold::finite(bd);
    return p;
}

} // namespace

TEST_CASE("simulation determinism") {
    ModelParams m = table_model();
    SimConfig cfg;
    cfg.seed = 99;
    cfg.replications = 500;
    SimEstimate a = simulate_discounted(policy_of(2, 3), m, cfg);
    SimEstimate b = simulate_discounted(policy_of(2, 3), m, cfg);
    CHECK(a.mean == b.mean);
    CHECK(a.half_width_95 == b.half_width_95);
    cfg.seed = 100;
    SimEstimate c = simulate_discounted(policy_of(2, 3), m, cfg);
    CHECK(a.mean != c.mean);
}

TEST_CASE("reject-all policies are exactly zero from an empty start") {
    ModelParams m = table_model();
    SimConfig cfg;
    cfg.replications = 200;
    SUBCASE("discounted") {
        SimEstimate e = simulate_discounted(policy_of(5, -1), m, cfg);
        CHECK(e.mean == 0.0);
        CHECK(e.half_width_95 == 0.0);
    }
    SUBCASE("average") {
        cfg.horizon = SimConfig::Horizon::TimeAverage;
        cfg.time_horizon = 200.0;
        cfg.replications = 8;
        SimEstimate e = simulate_average(policy_of(5, -1), m, cfg);
        CHECK(e.mean == 0.0);
        CHECK(e.half_width_95 == 0.0);
    }
}

TEST_CASE("discounted estimates straddle the exact policy value") {
    ModelParams m = table_model();
    TruncationSpec trunc{64, 8};
    SimConfig cfg;
    cfg.seed = 7;
    cfg.replications = 20000;
    cfg.epsilon_tail = 1e-5;

    SUBCASE("optimal policy of the reference instance") {
        ThresholdPolicy pol = solve_adaptive(m, trunc, 1e-9).policy;
        const double exact = evaluate_threshold_policy(pol, m, trunc).values.v0[0];
        SimEstimate e = simulate_discounted(pol, m, cfg);
        CHECK(std::abs(e.mean - exact) <= 3.0 * e.half_width_95 + 1e-6);
    }
    SUBCASE("a deliberately suboptimal policy") {
        ThresholdPolicy pol = policy_of(0, 5);
        const double exact = evaluate_threshold_policy(pol, m, trunc).values.v0[0];
        SimEstimate e = simulate_discounted(pol, m, cfg);
        CHECK(std::abs(e.mean - exact) <= 3.0 * e.half_width_95 + 1e-6);
    }
    SUBCASE("a start inside the queue, at an arrival epoch") {
        ThresholdPolicy pol = policy_of(1, 3);
        SimConfig c2 = cfg;
        c2.x0 = 4;
        c2.i0 = 1;
        PolicyValue pv = evaluate_threshold_policy(pol, m, trunc);
        SimEstimate e = simulate_discounted(pol, m, c2);
        CHECK(std::abs(e.mean - pv.values.v1[4]) <= 3.0 * e.half_width_95 + 1e-6);
    }
}

TEST_CASE("average estimates straddle the stationary profit rate") {
    ModelParams m = table_model();
    SimConfig cfg;
    cfg.seed = 13;
    cfg.horizon = SimConfig::Horizon::TimeAverage;
    cfg.time_horizon = 3000.0;
    cfg.replications = 12;

    ThresholdPolicy pol = policy_of(1, 2);
    const double g = testutil::birth_death_average_profit(m, pol);
    SimEstimate e = simulate_average(pol, m, cfg);
    CHECK(std::abs(e.mean - g) <= 3.0 * e.half_width_95);

    SUBCASE("insensitive to the initial state") {
        SimConfig c2 = cfg;
        c2.x0 = 3;
        c2.seed = 14;
        SimEstimate e2 = simulate_average(pol, m, c2);
        CHECK(std::abs(e.mean - e2.mean) <= 3.0 * (e.half_width_95 + e2.half_width_95));
    }
}

TEST_CASE("half-width shrinks like one over root replications") {
    ModelParams m = table_model();
    SimConfig cfg;
    cfg.seed = 21;
    cfg.replications = 2000;
    SimEstimate small = simulate_discounted(policy_of(2, 3), m, cfg);
    cfg.replications = 8000;
    SimEstimate big = simulate_discounted(policy_of(2, 3), m, cfg);
    const double ratio = small.half_width_95 / big.half_width_95;
    CHECK(ratio > 1.4);
    CHECK(ratio < 2.6);
}

TEST_CASE("trace capture") {
    ModelParams m = table_model();
    SimConfig cfg;
    cfg.replications = 2;
    cfg.i0 = 1;
    std::vector<TraceRow> trace;
    simulate_discounted(policy_of(1, 2), m, cfg, &trace);
    REQUIRE(!trace.empty());
    CHECK(trace.front().t == 0.0);
    CHECK(trace.front().event == "arrival");
    CHECK(trace.front().action_admit == 1);
    for (const auto& r : trace) {
        CHECK(r.x >= 0);
        CHECK((r.event == "arrival" || r.event == "departure"));
        CHECK((r.action_service == 'l' || r.action_service == 'h'));
    }
}

TEST_CASE("unstable-policy warning") {
    ModelParams m = table_model();
    m.lambda = 10;  // exceeds mu_high = 6
    ThresholdPolicy pol;
    pol.b_service = Threshold::finite(2);
    pol.b_admission = Threshold::at_least(64);
    SimConfig cfg;
    cfg.horizon = SimConfig::Horizon::TimeAverage;
    cfg.time_horizon = 50.0;
    cfg.replications = 2;
    std::vector<std::string> warnings;
    simulate_average(pol, m, cfg, nullptr, &warnings);
    REQUIRE(!warnings.empty());
    CHECK(warnings.front().find("unstable") != std::string::npos);
}
