#include <doctest.h>

#include <cmath>

#include "flexq/flexibility.hpp"
#include "test_util.hpp"

using namespace flexq;

namespace {

ModelParams table_model(double lambda, double mu_high) {
    ModelParams m;
    m.lambda = lambda;
    m.mu_low = 3;
    m.mu_high = mu_high;
    m.service_cost = 8;
    m.reward = 4;
    m.beta = 1;
    m.holding = HoldingCost::power(1.0, 2.0);
    return m;
}

ModelParams figure_base(double R) {
    ModelParams m;
    m.lambda = 5;
    m.mu_low = 3;
    m.mu_high = 5;
    m.service_cost = 6;
    m.reward = R;
    m.beta = 0.5;
    m.holding = HoldingCost::power(1.0, 2.0);
    return m;
}

} // namespace

TEST_CASE("flexibility at the reference instances") {
    SUBCASE("lambda=2, delta/mu_l=1.0") {
        FlexibilityReport rep = flexibility(table_model(2, 6), TruncationSpec{64, 8});
        CHECK(rep.thresholds_combined.b_service == Threshold::finite(2));
        CHECK(rep.thresholds_combined.b_admission == Threshold::finite(3));
        CHECK(rep.threshold_admission_only == Threshold::finite(2));
        CHECK(rep.verdict == FlexVerdict::FlexActive);
        CHECK(std::abs(rep.relative_at_origin - 0.0124) <= 0.002);
    }
    SUBCASE("lambda=20, delta/mu_l=2.0: converged values hit the hand-solved forms") {
        FlexibilityReport rep = flexibility(table_model(20, 9), TruncationSpec{64, 8});
        const double v_comb = 2252.0 / 81.0;   // optimal policy (0,2), solved by hand
        const double v_adm = 1900.0 / 129.0;   // optimal restricted policy (1), solved by hand
        CHECK(rep.combined.v0[0] == doctest::Approx(v_comb).epsilon(1e-9));
        CHECK(rep.admission_only.v0[0] == doctest::Approx(v_adm).epsilon(1e-9));
        CHECK(rep.eps0[0] == doctest::Approx(v_comb - v_adm).epsilon(1e-8));
        CHECK(rep.relative_at_origin == doctest::Approx(v_comb / v_adm - 1.0).epsilon(1e-8));
    }
    SUBCASE("lambda=20, delta/mu_l=2.0: the 100-step recursion reproduces 0.8243") {
        ModelParams m = table_model(20, 9);
        TruncationSpec trunc{128, 8};
        ValueFunction c = finite_horizon_iterate(m, 100, trunc).back();
        ValueFunction a = finite_horizon_iterate(m, 100, trunc, ProblemVariant::AdmissionOnly).back();
        CHECK(std::abs((c.v0[0] - a.v0[0]) / a.v0[0] - 0.8243) <= 0.002);
    }
}

TEST_CASE("flexibility vanishes when the thresholds stay ordered") {
    SUBCASE("reward at or below c/delta") {
        for (double R : {1.0, 2.0, 3.0}) {
            FlexibilityReport rep = flexibility(figure_base(R), TruncationSpec{64, 8});
            CHECK(rep.verdict == FlexVerdict::FlexValueless);
            CHECK(rep.threshold_admission_only == rep.thresholds_combined.b_admission);
            REQUIRE(rep.thresholds_combined.b_service.is_finite());
            const int bs = rep.thresholds_combined.b_service.value;
            for (int x = 0; x <= bs; ++x) {
                CHECK(std::abs(rep.eps0[static_cast<size_t>(x)]) <= 1e-7);
                CHECK(std::abs(rep.eps1[static_cast<size_t>(x)]) <= 1e-7);
            }
        }
    }
    SUBCASE("the same conclusion holds whenever Bs >= Bd+1, even above c/delta") {
        // c/delta = 3 here, and R = 3.2 still yields an ordered policy
        FlexibilityReport rep = flexibility(figure_base(3.2), TruncationSpec{64, 8});
        REQUIRE(rep.verdict == FlexVerdict::FlexValueless);
        CHECK(rep.thresholds_combined.b_admission == rep.threshold_admission_only);
        const int bs = rep.thresholds_combined.b_service.value;
        for (int x = 0; x <= bs; ++x) CHECK(std::abs(rep.eps0[static_cast<size_t>(x)]) <= 1e-7);
    }
    SUBCASE("randomized instances with R <= c/delta") {
        testutil::Rng rng(31337);
        for (int trial = 0; trial < 20; ++trial) {
            SolveResult res;
            ModelParams m = testutil::solvable_instance(rng, /*reward_capped=*/true, &res);
            FlexibilityReport rep = flexibility(m, TruncationSpec{64, 8});
            REQUIRE(rep.thresholds_combined.b_admission.is_finite());
            if (rep.thresholds_combined.b_service.is_finite())
                CHECK(rep.thresholds_combined.b_service.value >=
                      rep.thresholds_combined.b_admission.value + 1);
            CHECK(rep.threshold_admission_only == rep.thresholds_combined.b_admission);
            const int bs = rep.thresholds_combined.b_service.is_finite()
                               ? rep.thresholds_combined.b_service.value
                               : rep.combined.x_max() - rep.combined.trunc.safety_margin;
            for (int x = 0; x <= bs; ++x) {
                CHECK(std::abs(rep.eps0[static_cast<size_t>(x)]) <= 1e-7);
                CHECK(std::abs(rep.eps1[static_cast<size_t>(x)]) <= 1e-7);
            }
        }
    }
}

TEST_CASE("flexibility is nonnegative and grows with congestion") {
    testutil::Rng rng(2718);
    for (int trial = 0; trial < 15; ++trial) {
        ModelParams m = testutil::solvable_instance(rng, trial % 2 == 0, nullptr);
        FlexibilityReport rep = flexibility(m, TruncationSpec{64, 8});
        const int top = rep.combined.x_max() - rep.combined.trunc.safety_margin;
        for (int i : {0, 1}) {
            const auto& eps = i == 0 ? rep.eps0 : rep.eps1;
            for (int x = 0; x <= top; ++x) CHECK(eps[static_cast<size_t>(x)] >= -1e-9);
            for (int x = 0; x + 1 <= top; ++x)
                CHECK(eps[static_cast<size_t>(x + 1)] >= eps[static_cast<size_t>(x)] - 1e-9);
        }
        // the restricted admission threshold never exceeds the combined one
        if (rep.thresholds_combined.b_admission.is_finite()) {
            REQUIRE(rep.threshold_admission_only.is_finite());
            CHECK(rep.threshold_admission_only.value <= rep.thresholds_combined.b_admission.value);
        }
    }
}

TEST_CASE("critical reward") {
    SUBCASE("the flip sits at or above c/delta at the figure base") {
        ModelParams base = figure_base(0.0);
        CriticalRewardResult res =
            critical_reward(base, base.c_over_delta(), base.c_over_delta() + 2.0, 0.1,
                            TruncationSpec{64, 8});
        CHECK(res.r_tilde >= base.c_over_delta());
        CHECK(res.bracket_low >= base.c_over_delta());
        CHECK(res.bracket_high > res.bracket_low);
        CHECK(res.bracket_high - res.bracket_low <= 0.1 / 128.0 + 1e-12);
        CHECK(res.warnings.empty());
    }
    SUBCASE("a scan entirely below c/delta never flips") {
        ModelParams base = figure_base(0.0);
        try {
            critical_reward(base, 0.0, base.c_over_delta() - 0.5, 0.25, TruncationSpec{64, 8});
            FAIL("expected NoCrossingInRange");
        } catch (const NoCrossingInRange& e) {
            CHECK(e.scan.size() > 1);
            for (const auto& p : e.scan) CHECK(p.verdict == FlexVerdict::FlexValueless);
        }
    }
    SUBCASE("a single-point scan cannot flip") {
        ModelParams base = figure_base(0.0);
        CHECK_THROWS_AS(critical_reward(base, 1.0, 1.5, 2.0, TruncationSpec{64, 8}),
                        NoCrossingInRange);
    }
}

TEST_CASE("parameter sweeps") {
    SUBCASE("reward sweep: service threshold falls, admission thresholds rise") {
        std::vector<double> rs;
        for (int k = 1; k <= 16; ++k) rs.push_back(0.5 * k);
        auto rows = sweep(figure_base(0.0), SweepAxis::Reward, rs, TruncationSpec{64, 8});
        REQUIRE(rows.size() == rs.size());
        for (size_t i = 0; i + 1 < rows.size(); ++i) {
            REQUIRE(rows[i].error.empty());
            auto val = [](const Threshold& t) { return t.is_finite() ? t.value : 1 << 20; };
            CHECK(val(rows[i + 1].b_service) <= val(rows[i].b_service));
            CHECK(val(rows[i + 1].b_admission) >= val(rows[i].b_admission));
            CHECK(val(rows[i + 1].b_admission_only) >= val(rows[i].b_admission_only));
        }
    }
    SUBCASE("service-rate sweep: relative flexibility is nondecreasing") {
        std::vector<double> mus;
        for (int k = 1; k <= 10; ++k) mus.push_back(3.0 + 0.6 * k);
        auto rows = sweep(table_model(2, 6), SweepAxis::MuHigh, mus, TruncationSpec{64, 8});
        for (size_t i = 0; i + 1 < rows.size(); ++i) {
            REQUIRE(rows[i].error.empty());
            CHECK(rows[i + 1].rel_flex >= rows[i].rel_flex - 1e-9);
        }
    }
    SUBCASE("empty value list gives an empty table") {
        CHECK(sweep(figure_base(1.0), SweepAxis::Reward, {}, TruncationSpec{64, 8}).empty());
    }
    SUBCASE("bad rows are recorded and the sweep continues") {
        std::vector<double> mus{4.0, 2.0, 6.0};  // 2.0 < mu_low: invalid
        auto rows = sweep(figure_base(1.0), SweepAxis::MuHigh, mus, TruncationSpec{64, 8});
        REQUIRE(rows.size() == 3);
        CHECK(!rows[0].error.empty());  // sorted: 2.0 first
        CHECK(rows[1].error.empty());
        CHECK(rows[2].error.empty());
    }
    SUBCASE("axis names parse") {
        CHECK(sweep_axis_from_string("R") == SweepAxis::Reward);
        CHECK(sweep_axis_from_string("c") == SweepAxis::ServiceCost);
        CHECK(sweep_axis_from_string("mu_high") == SweepAxis::MuHigh);
        CHECK(sweep_axis_from_string("lambda") == SweepAxis::Lambda);
        CHECK(sweep_axis_from_string("beta") == SweepAxis::Beta);
        CHECK_THROWS_AS(sweep_axis_from_string("nope"), InvalidParameter);
    }
}
