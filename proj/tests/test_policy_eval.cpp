#include <doctest.h>

#include <cmath>

#include "flexq/solver.hpp"
#include "test_util.hpp"

using namespace flexq;

namespace {

ModelParams heavy_model(double mu_high) {
    ModelParams m;
    m.lambda = 20;
    m.mu_low = 3;
    m.mu_high = mu_high;
    m.service_cost = 8;
    m.reward = 4;
    m.beta = 1;
    m.holding = HoldingCost::power(1.0, 2.0);
    return m;
}

} // namespace

TEST_CASE("policy evaluation closed forms") {
    SUBCASE("reject-all from an empty system is worth exactly zero") {
        ModelParams m = heavy_model(6.0);
        ThresholdPolicy pol;
        pol.b_service = Threshold::at_least(64);
        pol.b_admission = Threshold::finite(-1);
        PolicyValue pv = evaluate_threshold_policy(pol, m, TruncationSpec{32, 4});
        CHECK(pv.values.v0[0] == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(pv.values.v1[0] == doctest::Approx(0.0).epsilon(1e-14));
    }
    SUBCASE("admission-only threshold 1: hand-solved 3-state system") {
        // (beta+lambda) V0 = lambda (R + V1)
        // (beta+lambda+mu) V1 = -h(1) + lambda (R + V2) + mu V0
        // (beta+lambda+mu) V2 = -h(2) + lambda V2 + mu V1
        // lambda=20, mu=3, R=4, beta=1, h=x^2  =>  V0 = 1900/129
        ModelParams m = heavy_model(6.0);
        ThresholdPolicy pol;
        pol.variant = ProblemVariant::AdmissionOnly;
        pol.b_service = Threshold::at_least(64);
        pol.b_admission = Threshold::finite(1);
        PolicyValue pv = evaluate_threshold_policy(pol, m, TruncationSpec{64, 8});
        CHECK(pv.values.v0[0] == doctest::Approx(1900.0 / 129.0).epsilon(1e-12));
    }
    SUBCASE("combined (serve fast above 0, admit up to 2): hand-solved system") {
        // lambda=20, mu_l=3, mu_h=9, c=8, R=4, beta=1, h=x^2 => V0 = 2252/81
        ModelParams m = heavy_model(9.0);
        ThresholdPolicy pol;
        pol.b_service = Threshold::finite(0);
        pol.b_admission = Threshold::finite(2);
        PolicyValue pv = evaluate_threshold_policy(pol, m, TruncationSpec{64, 8});
        CHECK(pv.values.v0[0] == doctest::Approx(2252.0 / 81.0).epsilon(1e-12));
    }
    SUBCASE("thresholds outside the truncation are rejected") {
        ModelParams m = heavy_model(6.0);
        ThresholdPolicy pol;
        pol.b_service = Threshold::finite(40);
        pol.b_admission = Threshold::finite(2);
        CHECK_THROWS_AS(evaluate_threshold_policy(pol, m, TruncationSpec{32, 4}), InvalidParameter);
    }
}

TEST_CASE("policy evaluation agrees with the optimality solve") {
    testutil::Rng rng(1234);
    for (int trial = 0; trial < 10; ++trial) {
        SolveResult res;
        ModelParams m = testutil::solvable_instance(rng, trial % 2 == 0, &res);
        PolicyValue pv = evaluate_threshold_policy(res.policy, m, res.value.trunc);
        for (int x = 0; x <= res.value.x_max(); ++x) {
            CHECK(pv.values.v0[static_cast<size_t>(x)] ==
                  doctest::Approx(res.value.v0[static_cast<size_t>(x)]).epsilon(5e-8));
            CHECK(pv.values.v1[static_cast<size_t>(x)] ==
                  doctest::Approx(res.value.v1[static_cast<size_t>(x)]).epsilon(5e-8));
        }
    }
}

TEST_CASE("restricted system equivalence below the service threshold") {
    // For bs >= bd + 1, the first 2(bs+1) policy-evaluation equations of the
    // combined and admission-only systems coincide, so the values match on
    // x = 0..bs for both components.
    testutil::Rng rng(555);
    for (int trial = 0; trial < 25; ++trial) {
        ModelParams m = testutil::random_instance(rng, false);
        const int bd = rng.uniform_int(-1, 8);
        const int bs = bd + 1 + rng.uniform_int(0, 6);
        TruncationSpec trunc{48, 4};

        ThresholdPolicy comb;
        comb.b_service = Threshold::finite(bs);
        comb.b_admission = Threshold::finite(bd);
        ThresholdPolicy adm;
        adm.variant = ProblemVariant::AdmissionOnly;
        adm.b_service = Threshold::at_least(trunc.x_max);
        adm.b_admission = Threshold::finite(bd);

        PolicyValue a = evaluate_threshold_policy(comb, m, trunc);
        PolicyValue b = evaluate_threshold_policy(adm, m, trunc);
        for (int x = 0; x <= bs; ++x) {
            CHECK(std::abs(a.values.v0[static_cast<size_t>(x)] -
                           b.values.v0[static_cast<size_t>(x)]) <= 1e-8);
            CHECK(std::abs(a.values.v1[static_cast<size_t>(x)] -
                           b.values.v1[static_cast<size_t>(x)]) <= 1e-8);
        }
    }
}

TEST_CASE("exhaustive threshold search matches the solver on small caps") {
    testutil::Rng rng(2024);
    for (int trial = 0; trial < 6; ++trial) {
        ModelParams m;
        m.lambda = rng.uniform(0.5, 8.0);
        m.mu_low = rng.uniform(0.5, 6.0);
        m.mu_high = m.mu_low + rng.uniform(0.5, 4.0);
        m.service_cost = rng.uniform(0.5, 8.0);
        m.reward = rng.uniform(0.0, 6.0);
        m.beta = rng.uniform(0.2, 2.0);
        m.holding = HoldingCost::power(rng.uniform(0.5, 2.0), rng.uniform_int(1, 2));

        TruncationSpec trunc{12, 2};
        ValueFunction v = solve_discounted(m, trunc, 1e-10, SolveOptions{}.max_iters,
                                           ProblemVariant::Combined, std::nullopt,
                                           /*check_truncation=*/false);
        std::vector<double> best = testutil::brute_force_best(m, trunc, RewardTiming::AtAdmission);
        for (int x = 0; x <= trunc.x_max; ++x) {
            CHECK(std::abs(v.v0[static_cast<size_t>(x)] - best[static_cast<size_t>(x)]) <= 1e-6);
            CHECK(std::abs(v.v1[static_cast<size_t>(x)] -
                           best[static_cast<size_t>(trunc.x_max + 1 + x)]) <= 1e-6);
        }
    }
}

TEST_CASE("anchored evaluation matches the raw one") {
    testutil::Rng rng(888);
    for (int trial = 0; trial < 20; ++trial) {
        ModelParams m = testutil::random_instance(rng, false);
        if (trial % 3 == 0) m.timing = RewardTiming::AtDeparture;
        ThresholdPolicy pol;
        pol.timing = m.timing;
        pol.b_admission = Threshold::finite(rng.uniform_int(-1, 10));
        pol.b_service = trial % 4 == 0 ? Threshold::at_least(48) : Threshold::finite(rng.uniform_int(0, 12));
        TruncationSpec trunc{48, 4};

        PolicyValue raw = evaluate_threshold_policy(pol, m, trunc);
        AnchoredPolicyValue anc = evaluate_policy_anchored(pol, m, trunc);
        CHECK(anc.g == doctest::Approx(m.beta * raw.values.v0[0]).epsilon(1e-9));
        for (int x = 0; x <= trunc.x_max; ++x) {
            CHECK(anc.w0[static_cast<size_t>(x)] ==
                  doctest::Approx(raw.values.v0[static_cast<size_t>(x)] - raw.values.v0[0])
                      .epsilon(1e-9).scale(std::abs(raw.values.v0[0]) + 1.0));
            CHECK(anc.w1[static_cast<size_t>(x)] ==
                  doctest::Approx(raw.values.v1[static_cast<size_t>(x)] - raw.values.v0[0])
                      .epsilon(1e-9).scale(std::abs(raw.values.v0[0]) + 1.0));
        }
    }
}
