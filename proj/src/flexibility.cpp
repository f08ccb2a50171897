#include "flexq/flexibility.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace flexq {

std::string to_string(FlexVerdict v) {
    return v == FlexVerdict::FlexValueless ? "valueless" : "active";
}

namespace {

FlexVerdict verdict_of(const ThresholdPolicy& combined) {
    // b_service >= b_admission + 1 means the high rate is only ever used in
    // states where arrivals are already refused.
    if (!combined.b_service.is_finite()) return FlexVerdict::FlexValueless;
    if (!combined.b_admission.is_finite()) return FlexVerdict::FlexActive;
    return combined.b_service.value >= combined.b_admission.value + 1
               ? FlexVerdict::FlexValueless
               : FlexVerdict::FlexActive;
}

} // namespace

FlexibilityReport flexibility(const ModelParams& model, TruncationSpec trunc, double tol) {
    SolveResult comb = solve_adaptive(model, trunc, tol);

    // The admission-only threshold never exceeds the combined one, so the
    // combined run's final truncation is roomy enough for both solves.
    TruncationSpec common = comb.value.trunc;
    ValueFunction adm = solve_discounted(model, common, tol, SolveOptions{}.max_iters,
                                         ProblemVariant::AdmissionOnly);
    BurdenFunction adm_burden = burden_of(adm);

    FlexibilityReport rep;
    rep.thresholds_combined = comb.policy;
    ThresholdPolicy adm_pol =
        extract_thresholds(adm_burden, model, ProblemVariant::AdmissionOnly, adm.timing,
                           common.safety_margin, tol, &rep.warnings);
    rep.threshold_admission_only = adm_pol.b_admission;
    rep.verdict = verdict_of(comb.policy);

    // epsilon is a difference of two solves, so iteration noise would leak
    // straight into it.  Re-evaluating the extracted optimal policies by the
    // exact linear solve removes that: when the two problems share their
    // policy-evaluation block (service threshold above the admission one),
    // the refined values coincide exactly below it.
    {
        PolicyValue pc = evaluate_threshold_policy(comb.policy, model, common);
        comb.value.v0 = std::move(pc.values.v0);
        comb.value.v1 = std::move(pc.values.v1);
        PolicyValue pa = evaluate_threshold_policy(adm_pol, model, common);
        adm.v0 = std::move(pa.values.v0);
        adm.v1 = std::move(pa.values.v1);
    }

    const size_t n = comb.value.v0.size();
    rep.eps0.resize(n);
    rep.eps1.resize(n);
    for (size_t i = 0; i < n; ++i) {
        rep.eps0[i] = comb.value.v0[i] - adm.v0[i];
        rep.eps1[i] = comb.value.v1[i] - adm.v1[i];
    }

    const double origin_gain = rep.eps0[0];
    const double denom = adm.v0[0];
    if (denom > 0.0) {
        rep.relative_at_origin = origin_gain / denom;
    } else {
        rep.relative_at_origin = origin_gain;
        rep.relative_is_absolute = true;
        rep.warnings.push_back("admission-only value at the origin is nonpositive; "
                               "reporting the absolute gain instead of a ratio");
    }

    for (const auto& w : comb.value.warnings) rep.warnings.push_back(w);
    for (const auto& w : adm.warnings) rep.warnings.push_back(w);
    rep.combined = std::move(comb.value);
    rep.admission_only = std::move(adm);
    return rep;
}

CriticalRewardResult critical_reward(const ModelParams& base, double r_min, double r_max,
                                     double resolution, TruncationSpec trunc, double tol) {
    if (!(resolution > 0.0)) throw InvalidParameter("critical_reward: resolution must be > 0");
    if (!(r_min >= 0.0) || !(r_max >= r_min))
        throw InvalidParameter("critical_reward: need 0 <= r_min <= r_max");

    CriticalRewardResult res;
    for (long k = 0;; ++k) {
        const double r = r_min + resolution * static_cast<double>(k);
        if (r > r_max + 1e-12) break;
        FlexibilityReport rep = flexibility(base.with_reward(r), trunc, tol);
        res.scan.push_back({r, rep.verdict});
    }

    int changes = 0;
    size_t flip = 0;
    for (size_t i = 0; i + 1 < res.scan.size(); ++i) {
        if (res.scan[i].verdict != res.scan[i + 1].verdict) {
            ++changes;
            flip = i;
        }
    }
    if (changes == 0) {
        std::ostringstream os;
        os << "verdict is " << to_string(res.scan.front().verdict) << " over the whole scan ["
           << r_min << ", " << r_max << "]";
        throw NoCrossingInRange(os.str(), std::move(res.scan));
    }

    double largest_valueless = -1.0;
    for (const auto& p : res.scan)
        if (p.verdict == FlexVerdict::FlexValueless) largest_valueless = std::max(largest_valueless, p.reward);
    res.r_tilde = largest_valueless;

    const bool single_rising = changes == 1 && res.scan[flip].verdict == FlexVerdict::FlexValueless;
    if (!single_rising) {
        res.warnings.push_back("scan shows more than one verdict change; bracket not refined");
        res.bracket_low = largest_valueless;
        double next_active = r_max;
        for (const auto& p : res.scan)
            if (p.verdict == FlexVerdict::FlexActive && p.reward > largest_valueless) {
                next_active = p.reward;
                break;
            }
        res.bracket_high = next_active;
        return res;
    }

    double lo = res.scan[flip].reward;
    double hi = res.scan[flip + 1].reward;
    const double target = resolution / 128.0;
    while (hi - lo > target) {
        const double mid = 0.5 * (lo + hi);
        FlexibilityReport rep = flexibility(base.with_reward(mid), trunc, tol);
        if (rep.verdict == FlexVerdict::FlexValueless)
            lo = mid;
        else
            hi = mid;
    }
    res.bracket_low = lo;
    res.bracket_high = hi;
    return res;
}

namespace {

// Violations of the average-reward optimality inequalities at (w, g),
// evaluated away from the truncation edge.  Multiplied through by the
// uniform rate Lambda; nonpositive values mean the inequality holds.
double aroi_residual(const std::vector<double>& w0, const std::vector<double>& w1, double g,
                     const ModelParams& m, RewardTiming timing, int safety_margin) {
    const int X = static_cast<int>(w0.size()) - 1;
    const int top = X - safety_margin;
    const double Lam = m.uniform_rate();
    const double r_adm = timing == RewardTiming::AtAdmission ? m.reward : 0.0;
    const double r_dep = timing == RewardTiming::AtDeparture ? m.reward : 0.0;
    const double delta = m.delta();
    double worst = 0.0;

    // arrival-epoch rows
    for (int x = 0; x + 1 <= top; ++x) {
        const double rhs = std::max(r_adm + w0[static_cast<size_t>(x + 1)], w0[static_cast<size_t>(x)]);
        worst = std::max(worst, w1[static_cast<size_t>(x)] - rhs);
    }
    // departure-epoch rows
    for (int x = 1; x <= top; ++x) {
        const double keep = delta * w0[static_cast<size_t>(x)];
        const double swift = -m.service_cost + delta * (r_dep + w0[static_cast<size_t>(x - 1)]);
        const double rhs = -m.holding(x) - g + m.lambda * w1[static_cast<size_t>(x)] +
                           m.mu_low * (r_dep + w0[static_cast<size_t>(x - 1)]) + std::max(keep, swift);
        worst = std::max(worst, Lam * w0[static_cast<size_t>(x)] - rhs);
    }
    // empty-state row; w0[0] = 0
    worst = std::max(worst, g - m.lambda * w1[0]);
    return worst;
}

bool greedy_matches_policy(const AnchoredPolicyValue& apv, const ThresholdPolicy& pol,
                           const ModelParams& m, RewardTiming timing, int safety_margin) {
    const int X = apv.x_max();
    ActionTable greedy = greedy_actions_anchored(apv, m, timing);
    ActionTable want = policy_actions(pol, X);
    const int top = X - safety_margin;
    for (int x = 0; x + 1 <= top; ++x)
        if (greedy.admit[static_cast<size_t>(x)] != want.admit[static_cast<size_t>(x)]) return false;
    for (int x = 1; x <= top; ++x)
        if (greedy.serve_low[static_cast<size_t>(x)] != want.serve_low[static_cast<size_t>(x)]) return false;
    return true;
}

} // namespace

AverageRewardResult average_reward(const ModelParams& model, TruncationSpec trunc,
                                   AverageRewardOptions opts) {
    model.validate();
    trunc.validate();
    if (!(opts.beta0 > 0.0)) throw InvalidParameter("average_reward: beta0 must be > 0");
    if (!(opts.shrink > 0.0 && opts.shrink < 1.0))
        throw InvalidParameter("average_reward: shrink must be in (0,1)");
    if (opts.max_stages < 2) throw InvalidParameter("average_reward: max_stages must be >= 2");

    AverageRewardResult out;
    const RewardTiming timing = model.timing;

    // Stage 0: a plain discounted solve pins down the starting thresholds and
    // the working truncation (with headroom for later-stage threshold growth).
    // Growth is capped early: a ladder whose admission threshold needs a
    // four-digit state space signals thresholds that are effectively
    // unbounded, which no finite truncation can certify.
    const int kLadderCap = 1024;
    ModelParams m0 = model;
    m0.beta = opts.beta0;
    SolveResult s0 = solve_adaptive(m0, trunc, opts.tol, SolveOptions{}.max_iters,
                                    ProblemVariant::Combined, std::nullopt, kLadderCap);
    TruncationSpec T = s0.value.trunc;
    T.x_max = std::min(2 * T.x_max, kLadderCap);
    for (const auto& w : s0.value.warnings) out.warnings.push_back(w);

    ThresholdPolicy candidate = s0.policy;
    out.beta_sequence.push_back(opts.beta0);
    out.g_trace.push_back(opts.beta0 * s0.value.v0[0]);

    ThresholdPolicy prev = candidate;
    double g_prev = out.g_trace.back();
    AnchoredPolicyValue final_apv;
    bool have_final = false;

    for (int n = 1; n < opts.max_stages; ++n) {
        const double beta_n = opts.beta0 * std::pow(opts.shrink, n);
        ModelParams mn = model;
        mn.beta = beta_n;

        // Grow the truncation if the candidate drifts toward the cap.
        while ((candidate.b_admission.is_finite() &&
                candidate.b_admission.value > T.x_max - T.safety_margin) &&
               T.x_max < kLadderCap)
            T.x_max *= 2;
        if (candidate.b_admission.is_finite() &&
            candidate.b_admission.value > T.x_max - T.safety_margin)
            throw TruncationTooTight("admission threshold keeps growing along the discount ladder",
                                     2 * T.x_max);

        AnchoredPolicyValue apv = evaluate_policy_anchored(candidate, mn, T);
        bool certified = greedy_matches_policy(apv, candidate, mn, timing, T.safety_margin);
        if (!certified) {
            // Thresholds moved at this beta: re-solve while value iteration is
            // still affordable, then re-certify the new candidate exactly.
            if (beta_n < opts.vi_floor)
                throw NotStabilized("thresholds still changing below the value-iteration floor "
                                    "(beta = " + std::to_string(beta_n) + ")", n);
            SolveResult sn = solve_adaptive(mn, T, opts.tol, SolveOptions{}.max_iters,
                                            ProblemVariant::Combined, std::nullopt, kLadderCap);
            if (sn.value.trunc.x_max > T.x_max) T = sn.value.trunc;
            candidate = sn.policy;
            apv = evaluate_policy_anchored(candidate, mn, T);
            certified = greedy_matches_policy(apv, candidate, mn, timing, T.safety_margin);
            if (!certified)
                out.warnings.push_back("greedy certificate inconclusive at beta = " +
                                       std::to_string(beta_n) + " (near-tie burden)");
        }

        out.beta_sequence.push_back(beta_n);
        out.g_trace.push_back(apv.g);

        const double resid = aroi_residual(apv.w0, apv.w1, apv.g, mn, timing, T.safety_margin);
        double spread = 0.0;
        for (int x = 0; x <= 4 && x <= apv.x_max(); ++x) {
            spread = std::max(spread, beta_n * std::abs(apv.w0[static_cast<size_t>(x)]));
            spread = std::max(spread, beta_n * std::abs(apv.w1[static_cast<size_t>(x)]));
        }

        const bool thresholds_stable = candidate == prev;
        const bool g_settled = std::abs(apv.g - g_prev) <= opts.stop_tol;
        if (thresholds_stable && g_settled && resid <= opts.stop_tol && spread <= opts.spread_tol) {
            out.stabilized = true;
            out.max_residual = resid;
            out.spread = spread;
            out.stages_used = n + 1;
            final_apv = std::move(apv);
            have_final = true;
            break;
        }
        prev = candidate;
        g_prev = apv.g;
    }

    if (!have_final)
        throw NotStabilized("vanishing-discount sequence did not stabilize", opts.max_stages);

    out.g_star = final_apv.g;
    out.w0 = std::move(final_apv.w0);
    out.w1 = std::move(final_apv.w1);
    out.policy = candidate;
    out.trunc = T;
    return out;
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "R" || name == "reward") return SweepAxis::Reward;
    if (name == "c" || name == "service_cost") return SweepAxis::ServiceCost;
    if (name == "mu_high") return SweepAxis::MuHigh;
    if (name == "lambda") return SweepAxis::Lambda;
    if (name == "beta") return SweepAxis::Beta;
    throw InvalidParameter("unknown sweep axis: " + name +
                           " (expected R, c, mu_high, lambda or beta)");
}

std::string to_string(SweepAxis axis) {
    switch (axis) {
    case SweepAxis::Reward: return "R";
    case SweepAxis::ServiceCost: return "c";
    case SweepAxis::MuHigh: return "mu_high";
    case SweepAxis::Lambda: return "lambda";
    case SweepAxis::Beta: return "beta";
    }
    return "?";
}

std::vector<SweepRow> sweep(const ModelParams& base, SweepAxis axis,
                            std::span<const double> values, TruncationSpec trunc, double tol) {
    std::vector<SweepRow> rows;
    rows.reserve(values.size());
    for (double v : values) {
        SweepRow row;
        row.value = v;
        try {
            ModelParams m = base;
            switch (axis) {
            case SweepAxis::Reward: m = base.with_reward(v); break;
            case SweepAxis::ServiceCost: m = base.with_service_cost(v); break;
            case SweepAxis::MuHigh: m = base.with_mu_high(v); break;
            case SweepAxis::Lambda: m = base.with_lambda(v); break;
            case SweepAxis::Beta: m = base.with_beta(v); break;
            }
            FlexibilityReport rep = flexibility(m, trunc, tol);
            row.b_service = rep.thresholds_combined.b_service;
            row.b_admission = rep.thresholds_combined.b_admission;
            row.b_admission_only = rep.threshold_admission_only;
            row.rel_flex = rep.relative_at_origin;
            row.rel_is_absolute = rep.relative_is_absolute;
            row.verdict = rep.verdict;
        } catch (const Error& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
    return rows;
}

} // namespace flexq
