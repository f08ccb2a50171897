#include "flexq/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "flexq/tridiagonal.hpp"

namespace flexq {

namespace {

// Per-step coefficients of the uniformized recursion, in original time units
// (every departure-epoch row is divided by D = Lambda + beta).
struct StepCoeffs {
    double D, lambda, mu_low, mu_high, delta, c;
    double r_adm, r_dep;  // reward attached to admissions / departures
    bool combined;
    std::vector<double> h;

    StepCoeffs(const ModelParams& m, ProblemVariant variant, RewardTiming timing, int x_max)
        : D(m.uniform_rate() + m.beta),
          lambda(m.lambda),
          mu_low(m.mu_low),
          mu_high(m.mu_high),
          delta(m.delta()),
          c(m.service_cost),
          r_adm(timing == RewardTiming::AtAdmission ? m.reward : 0.0),
          r_dep(timing == RewardTiming::AtDeparture ? m.reward : 0.0),
          combined(variant == ProblemVariant::Combined) {
        h.resize(static_cast<size_t>(x_max) + 1);
        for (int x = 0; x <= x_max; ++x) h[static_cast<size_t>(x)] = m.holding(x);
    }

    // One sweep of the recursion.  The arrival-epoch component couples to the
    // departure-epoch component of the SAME step, so all of n0 is computed
    // before any of n1.  Arrivals at x_max are force-rejected.
    void step(const std::vector<double>& v0, const std::vector<double>& v1,
              std::vector<double>& n0, std::vector<double>& n1) const {
        const int X = static_cast<int>(v0.size()) - 1;
        n0[0] = (lambda * v1[0] + mu_high * v0[0]) / D;
        for (int x = 1; x <= X; ++x) {
            const double keep = delta * v0[static_cast<size_t>(x)];
            double extra = keep;
            if (combined) {
                const double swift = -c + delta * (r_dep + v0[static_cast<size_t>(x - 1)]);
                extra = std::max(keep, swift);
            }
            n0[static_cast<size_t>(x)] =
                (-h[static_cast<size_t>(x)] + lambda * v1[static_cast<size_t>(x)] +
                 mu_low * (r_dep + v0[static_cast<size_t>(x - 1)]) + extra) / D;
        }
        for (int x = 0; x < X; ++x)
            n1[static_cast<size_t>(x)] =
                std::max(r_adm + n0[static_cast<size_t>(x + 1)], n0[static_cast<size_t>(x)]);
        n1[static_cast<size_t>(X)] = n0[static_cast<size_t>(X)];
    }
};

struct ThresholdProbe {
    Threshold b_service, b_admission;
};

// Thresholds straight from the burden, without the monotonicity precondition.
// Used only to detect truncation tightness.
ThresholdProbe probe_thresholds(const std::vector<double>& d0, const ModelParams& m,
                                ProblemVariant variant, RewardTiming timing) {
    const double theta_d = timing == RewardTiming::AtAdmission ? m.reward : 0.0;
    const double theta_s = timing == RewardTiming::AtAdmission ? m.c_over_delta()
                                                               : m.c_over_delta() - m.reward;
    ThresholdProbe p;
    p.b_admission = threshold_T(d0, theta_d);
    if (variant == ProblemVariant::AdmissionOnly) {
        p.b_service = Threshold::at_least(static_cast<int>(d0.size()));
    } else {
        Threshold t = threshold_T(d0, theta_s);
        p.b_service = t.unbounded ? Threshold::at_least(t.value + 1) : Threshold::finite(t.value + 1);
    }
    return p;
}

bool lands_in_margin(const Threshold& t, int x_max, int margin) {
    if (t.unbounded) return true;
    return t.value > x_max - margin;
}

void check_tightness(const ValueFunction& v, const ModelParams& m, ProblemVariant variant,
                     RewardTiming timing) {
    BurdenFunction b = burden_of(v);
    ThresholdProbe p = probe_thresholds(b.d0, m, variant, timing);
    const int X = v.x_max();
    const int margin = v.trunc.safety_margin;
    if (lands_in_margin(p.b_admission, X, margin)) {
        std::ostringstream os;
        os << "admission threshold " << p.b_admission.to_string() << " lands within "
           << margin << " of x_max=" << X;
        throw TruncationTooTight(os.str(), 2 * X);
    }
    if (p.b_service.is_finite() && p.b_service.value > X - margin) {
        std::ostringstream os;
        os << "service threshold " << p.b_service.value << " lands within "
           << margin << " of x_max=" << X;
        throw TruncationTooTight(os.str(), 2 * X);
    }
}

} // namespace

Threshold threshold_T(std::span<const double> f, double theta) {
    const int N = static_cast<int>(f.size()) - 1;
    if (N < 0) return Threshold::finite(-1);
    if (f[static_cast<size_t>(N)] <= theta) return Threshold::at_least(N);
    for (int k = N - 1; k >= 0; --k)
        if (f[static_cast<size_t>(k)] <= theta) return Threshold::finite(k);
    return Threshold::finite(-1);
}

std::vector<ValueFunction> finite_horizon_iterate(const ModelParams& model, int n_steps,
                                                  TruncationSpec trunc,
                                                  ProblemVariant variant,
                                                  std::optional<RewardTiming> timing) {
    model.validate();
    trunc.validate();
    if (n_steps < 0) throw InvalidParameter("n_steps must be >= 0");
    const RewardTiming tm = timing.value_or(model.timing);
    const int X = trunc.x_max;
    StepCoeffs co(model, variant, tm, X);

    auto make_vf = [&](int n) {
        ValueFunction v;
        v.v0.assign(static_cast<size_t>(X) + 1, 0.0);
        v.v1.assign(static_cast<size_t>(X) + 1, 0.0);
        v.variant = variant;
        v.timing = tm;
        v.trunc = trunc;
        v.finite_steps = n;
        return v;
    };

    std::vector<ValueFunction> out;
    out.reserve(static_cast<size_t>(n_steps) + 1);
    out.push_back(make_vf(0));
    for (int n = 1; n <= n_steps; ++n) {
        ValueFunction v = make_vf(n);
        co.step(out.back().v0, out.back().v1, v.v0, v.v1);
        out.push_back(std::move(v));
    }

    if (n_steps > 0) {
        // Finite-horizon thresholds may legitimately be unbounded (e.g. the
        // zero-step burden is identically zero), so only a finite threshold
        // in the margin is an error here.
        BurdenFunction b = burden_of(out.back());
        ThresholdProbe p = probe_thresholds(b.d0, model, variant, tm);
        const int margin = trunc.safety_margin;
        if ((p.b_admission.is_finite() && p.b_admission.value > X - margin) ||
            (p.b_service.is_finite() && p.b_service.value > X - margin))
            throw TruncationTooTight("finite-horizon threshold lands within the safety margin", 2 * X);
    }
    return out;
}

ValueFunction solve_discounted(const ModelParams& model, TruncationSpec trunc,
                               double tol, long max_iters,
                               ProblemVariant variant,
                               std::optional<RewardTiming> timing,
                               bool check_truncation,
                               const ValueFunction* warm_start) {
    model.validate();
    trunc.validate();
    if (!(tol > 0.0)) throw InvalidParameter("tol must be > 0");
    if (max_iters < 1) throw InvalidParameter("max_iters must be >= 1");
    const RewardTiming tm = timing.value_or(model.timing);

    ValueFunction v;
    v.variant = variant;
    v.timing = tm;
    v.trunc = trunc;

    Assumption1Verdict a1 = try_validate_assumption1(model.holding, model);
    if (!a1.holds) {
        if (model.holding.kind() == HoldingCost::Kind::Tabular)
            v.warnings.push_back("holding-cost growth condition not verified: " + a1.reason);
        else
            throw AssumptionViolated("holding-cost growth condition fails: " + a1.reason);
    } else if (a1.finite_prefix_only) {
        v.warnings.push_back("holding-cost growth condition verified on finite prefix only");
    }

    const int X = trunc.x_max;
    if (model.holding.extrapolates(X))
        v.warnings.push_back("tabular holding cost extrapolated linearly beyond its table");

    StepCoeffs co(model, variant, tm, X);
    const double alpha = model.uniform_rate() / co.D;
    const double stop = tol * (1.0 - alpha) / alpha;

    std::vector<double> v0(static_cast<size_t>(X) + 1, 0.0), v1(static_cast<size_t>(X) + 1, 0.0);
    if (warm_start && warm_start->x_max() == X) {
        v0 = warm_start->v0;
        v1 = warm_start->v1;
    }
    std::vector<double> n0(v0.size()), n1(v1.size());

    long it = 0;
    double res = 0.0;
    bool converged = false;
    bool stalled = false;
    double res_checkpoint = 1e300;
    for (; it < max_iters; ++it) {
        co.step(v0, v1, n0, n1);
        res = 0.0;
        double scale = 0.0;
        for (size_t i = 0; i < v0.size(); ++i) {
            res = std::max(res, std::abs(n0[i] - v0[i]));
            res = std::max(res, std::abs(n1[i] - v1[i]));
            scale = std::max(scale, std::abs(n0[i]));
        }
        v0.swap(n0);
        v1.swap(n1);
        if (res <= stop) {
            converged = true;
            break;
        }
        // Requested residuals can sit below the rounding noise of a sweep
        // when values are large (tiny beta).  Accept the noise floor once
        // progress stalls there instead of spinning to max_iters.
        if ((it & 63) == 63) {
            const double noise_floor = 32.0 * 2.220446049250313e-16 * (scale + 1.0);
            if (res <= noise_floor && res >= 0.5 * res_checkpoint) {
                stalled = true;
                break;
            }
            res_checkpoint = res;
        }
    }
    if (stalled)
        v.warnings.push_back("stopping residual limited by double precision; value error bound "
                             "is about " + std::to_string(res * alpha / (1.0 - alpha)) +
                             " instead of the requested tolerance");
    if (!converged && !stalled) {
        std::ostringstream os;
        os << "value iteration did not reach residual " << stop << " within " << max_iters
           << " iterations (last residual " << res << ")";
        throw NoConvergence(os.str());
    }

    v.v0 = std::move(v0);
    v.v1 = std::move(v1);
    v.infinite_horizon = true;
    v.residual = res;
    v.iterations = it + 1;

    if (check_truncation) check_tightness(v, model, variant, tm);
    return v;
}

SolveResult solve_adaptive(const ModelParams& model, TruncationSpec trunc, double tol,
                           long max_iters, ProblemVariant variant,
                           std::optional<RewardTiming> timing, int max_x_max) {
    // Growth for an unbounded service threshold is capped early: states above
    // the admission cutoff cannot be entered from below it, so a service
    // threshold reported as ">= cap" does not perturb the values underneath.
    const int service_growth_cap = std::min(1024, max_x_max);
    TruncationSpec t = trunc;
    for (;;) {
        ValueFunction v = solve_discounted(model, t, tol, max_iters, variant, timing,
                                           /*check_truncation=*/false);
        BurdenFunction b = burden_of(v);
        ThresholdProbe p = probe_thresholds(b.d0, model, variant, v.timing);
        const bool adm_tight = lands_in_margin(p.b_admission, t.x_max, t.safety_margin);
        const bool srv_finite_tight = p.b_service.is_finite() && p.b_service.value > t.x_max - t.safety_margin;
        const bool srv_sentinel = !p.b_service.is_finite();

        bool grow = false;
        if (adm_tight || srv_finite_tight) grow = t.x_max < max_x_max;
        else if (srv_sentinel && variant == ProblemVariant::Combined)
            grow = t.x_max < service_growth_cap;

        if (!grow) {
            if (adm_tight || srv_finite_tight) {
                std::ostringstream os;
                os << "thresholds (service " << p.b_service.to_string() << ", admission "
                   << p.b_admission.to_string() << ") stay within the safety margin at x_max="
                   << t.x_max;
                throw TruncationTooTight(os.str(), 2 * t.x_max);
            }
            if (srv_sentinel && variant == ProblemVariant::Combined)
                v.warnings.push_back("service threshold exceeds x_max=" +
                                     std::to_string(t.x_max) + "; reported as unbounded");
            SolveResult r;
            r.policy = extract_thresholds(b, model, variant, v.timing, t.safety_margin, tol,
                                          &v.warnings);
            r.value = std::move(v);
            r.burden = std::move(b);
            return r;
        }
        t.x_max *= 2;
    }
}

BurdenFunction burden_of(const ValueFunction& v) {
    BurdenFunction b;
    const int X = v.x_max();
    b.d0.resize(static_cast<size_t>(X));
    b.d1.resize(static_cast<size_t>(X));
    for (int x = 0; x < X; ++x) {
        b.d0[static_cast<size_t>(x)] = v.v0[static_cast<size_t>(x)] - v.v0[static_cast<size_t>(x + 1)];
        b.d1[static_cast<size_t>(x)] = v.v1[static_cast<size_t>(x)] - v.v1[static_cast<size_t>(x + 1)];
    }
    return b;
}

ThresholdPolicy extract_thresholds(const BurdenFunction& burden, const ModelParams& model,
                                   ProblemVariant variant, RewardTiming timing,
                                   int safety_margin, double tol,
                                   std::vector<std::string>* warnings) {
    const auto& d0 = burden.d0;
    const int N = static_cast<int>(d0.size());
    const int check_top = N - 1 - safety_margin;
    for (int x = 0; x < check_top; ++x) {
        const double slack = 1e-9 * std::max(1.0, std::abs(d0[static_cast<size_t>(x)]));
        if (d0[static_cast<size_t>(x + 1)] < d0[static_cast<size_t>(x)] - slack) {
            std::ostringstream os;
            os << "burden not nondecreasing at x=" << x << ": " << d0[static_cast<size_t>(x)]
               << " -> " << d0[static_cast<size_t>(x + 1)];
            throw NonMonotoneBurden(os.str());
        }
    }

    ThresholdProbe p = probe_thresholds(d0, model, variant, timing);
    if (warnings) {
        const double theta_d = timing == RewardTiming::AtAdmission ? model.reward : 0.0;
        const double theta_s = timing == RewardTiming::AtAdmission
                                   ? model.c_over_delta()
                                   : model.c_over_delta() - model.reward;
        double gap_d = 1e300, gap_s = 1e300;
        for (int x = 0; x < N; ++x) {
            gap_d = std::min(gap_d, std::abs(d0[static_cast<size_t>(x)] - theta_d));
            gap_s = std::min(gap_s, std::abs(d0[static_cast<size_t>(x)] - theta_s));
        }
        if (gap_d < 10.0 * tol)
            warnings->push_back("admission threshold decided by a near-tie burden");
        if (variant == ProblemVariant::Combined && gap_s < 10.0 * tol)
            warnings->push_back("service threshold decided by a near-tie burden");
    }

    ThresholdPolicy pol;
    pol.variant = variant;
    pol.timing = timing;
    pol.b_service = p.b_service;
    pol.b_admission = p.b_admission;
    return pol;
}

PolicyValue evaluate_threshold_policy(const ThresholdPolicy& policy, const ModelParams& model,
                                      TruncationSpec trunc) {
    model.validate();
    trunc.validate();
    const int X = trunc.x_max;
    if (policy.b_admission.is_finite() &&
        (policy.b_admission.value < -1 || policy.b_admission.value > X))
        throw InvalidParameter("admission threshold outside the truncation");
    if (policy.b_service.is_finite() &&
        (policy.b_service.value < -1 || policy.b_service.value > X))
        throw InvalidParameter("service threshold outside the truncation");

    const RewardTiming tm = policy.timing;
    const double r_adm = tm == RewardTiming::AtAdmission ? model.reward : 0.0;
    const double r_dep = tm == RewardTiming::AtDeparture ? model.reward : 0.0;
    const double D = model.uniform_rate() + model.beta;
    const double delta = model.delta();
    const bool combined = policy.variant == ProblemVariant::Combined;

    Tridiagonal A(static_cast<size_t>(X) + 1);
    std::vector<double> rhs(static_cast<size_t>(X) + 1, 0.0);
    for (int x = 0; x <= X; ++x) {
        const size_t r = static_cast<size_t>(x);
        const bool admit = policy.admits(x) && x < X;
        const bool high = combined && x >= 1 && !policy.serves_low(x);
        A.diag[r] = D;
        if (x == 0) {
            A.diag[r] -= model.mu_high;
        } else {
            rhs[r] -= model.holding(x);
            if (high) {
                rhs[r] += -model.service_cost + model.mu_high * r_dep;
                A.sub[r] -= model.mu_high;
            } else {
                rhs[r] += model.mu_low * r_dep;
                A.sub[r] -= model.mu_low;
                A.diag[r] -= delta;
            }
        }
        if (admit) {
            rhs[r] += model.lambda * r_adm;
            A.sup[r] -= model.lambda;
        } else {
            A.diag[r] -= model.lambda;
        }
    }

    PolicyValue pv;
    pv.policy = policy;
    pv.values.v0 = A.solve(std::move(rhs));
    pv.values.v1.resize(static_cast<size_t>(X) + 1);
    for (int x = 0; x <= X; ++x) {
        const bool admit = policy.admits(x) && x < X;
        pv.values.v1[static_cast<size_t>(x)] =
            admit ? r_adm + pv.values.v0[static_cast<size_t>(x + 1)]
                  : pv.values.v0[static_cast<size_t>(x)];
    }
    pv.values.variant = policy.variant;
    pv.values.timing = tm;
    pv.values.trunc = trunc;
    pv.values.infinite_horizon = true;
    return pv;
}

AnchoredPolicyValue evaluate_policy_anchored(const ThresholdPolicy& policy, const ModelParams& model,
                                             TruncationSpec trunc) {
    model.validate();
    trunc.validate();
    const int X = trunc.x_max;
    const RewardTiming tm = policy.timing;
    const double r_adm = tm == RewardTiming::AtAdmission ? model.reward : 0.0;
    const double r_dep = tm == RewardTiming::AtDeparture ? model.reward : 0.0;
    const double D = model.uniform_rate() + model.beta;
    const double delta = model.delta();
    const bool combined = policy.variant == ProblemVariant::Combined;
    const bool adm0 = policy.admits(0);

    // Unknowns w0[1..X]; w0[0] = 0 by the anchor.  The gain satisfies
    // g = lambda * (adm0 ? r_adm + w0[1] : 0) and enters every row, giving a
    // tridiagonal matrix plus one dense column on w0[1].
    const size_t n = static_cast<size_t>(X);
    Tridiagonal A(n);
    std::vector<double> rhs(n, 0.0);
    for (int x = 1; x <= X; ++x) {
        const size_t r = static_cast<size_t>(x - 1);
        const bool admit = policy.admits(x) && x < X;
        const bool high = combined && !policy.serves_low(x);
        A.diag[r] = D;
        rhs[r] -= model.holding(x);
        if (high) {
            rhs[r] += -model.service_cost + model.mu_high * r_dep;
            if (x >= 2) A.sub[r] -= model.mu_high;
        } else {
            rhs[r] += model.mu_low * r_dep;
            if (x >= 2) A.sub[r] -= model.mu_low;
            A.diag[r] -= delta;
        }
        if (admit) {
            rhs[r] += model.lambda * r_adm;
            A.sup[r] -= model.lambda;
        } else {
            A.diag[r] -= model.lambda;
        }
        if (adm0) rhs[r] -= model.lambda * r_adm;  // constant part of g
    }

    AnchoredPolicyValue out;
    out.policy = policy;
    out.w0.assign(static_cast<size_t>(X) + 1, 0.0);
    std::vector<double> w;
    if (adm0) {
        // g's dependence on w0[1] adds +lambda to column 0 of every row.
        std::vector<double> u(n, model.lambda);
        w = A.solve_rank1(rhs, u, 0);
    } else {
        w = A.solve(rhs);
    }
    for (int x = 1; x <= X; ++x) out.w0[static_cast<size_t>(x)] = w[static_cast<size_t>(x - 1)];
    out.g = adm0 ? model.lambda * (r_adm + out.w0[1]) : 0.0;

    out.w1.resize(static_cast<size_t>(X) + 1);
    for (int x = 0; x <= X; ++x) {
        const bool admit = policy.admits(x) && x < X;
        out.w1[static_cast<size_t>(x)] =
            admit ? r_adm + out.w0[static_cast<size_t>(x + 1)] : out.w0[static_cast<size_t>(x)];
    }
    return out;
}

namespace {

ActionTable greedy_from(const std::vector<double>& v0, const ModelParams& model,
                        ProblemVariant variant, RewardTiming timing) {
    const int X = static_cast<int>(v0.size()) - 1;
    const double r_adm = timing == RewardTiming::AtAdmission ? model.reward : 0.0;
    const double r_dep = timing == RewardTiming::AtDeparture ? model.reward : 0.0;
    const double delta = model.delta();
    ActionTable t;
    t.admit.assign(static_cast<size_t>(X) + 1, 0);
    t.serve_low.assign(static_cast<size_t>(X) + 1, 1);
    for (int x = 0; x < X; ++x)
        t.admit[static_cast<size_t>(x)] =
            r_adm + v0[static_cast<size_t>(x + 1)] >= v0[static_cast<size_t>(x)] ? 1 : 0;
    if (variant == ProblemVariant::Combined) {
        for (int x = 1; x <= X; ++x) {
            const double keep = delta * v0[static_cast<size_t>(x)];
            const double swift = -model.service_cost + delta * (r_dep + v0[static_cast<size_t>(x - 1)]);
            t.serve_low[static_cast<size_t>(x)] = keep >= swift ? 1 : 0;
        }
    }
    return t;
}

} // namespace

ActionTable greedy_actions(const ValueFunction& v, const ModelParams& model) {
    return greedy_from(v.v0, model, v.variant, v.timing);
}

ActionTable greedy_actions_anchored(const AnchoredPolicyValue& w, const ModelParams& model,
                                    RewardTiming timing) {
    return greedy_from(w.w0, model, w.policy.variant, timing);
}

ActionTable policy_actions(const ThresholdPolicy& policy, int x_max) {
    ActionTable t;
    t.admit.assign(static_cast<size_t>(x_max) + 1, 0);
    t.serve_low.assign(static_cast<size_t>(x_max) + 1, 1);
    for (int x = 0; x <= x_max; ++x) {
        t.admit[static_cast<size_t>(x)] = (policy.admits(x) && x < x_max) ? 1 : 0;
        t.serve_low[static_cast<size_t>(x)] = policy.serves_low(x) ? 1 : 0;
    }
    return t;
}

double max_monotonicity_violation(const ValueFunction& v, int component, int safety_margin) {
    const auto& a = component == 0 ? v.v0 : v.v1;
    const int top = v.x_max() - 1 - safety_margin;
    double worst = 0.0;
    for (int x = 0; x <= top; ++x)
        worst = std::max(worst, a[static_cast<size_t>(x + 1)] - a[static_cast<size_t>(x)]);
    return worst;
}

double max_concavity_violation(const ValueFunction& v, int component, int safety_margin) {
    const auto& a = component == 0 ? v.v0 : v.v1;
    const int top = v.x_max() - 1 - safety_margin;
    double worst = 0.0;
    for (int x = 0; x + 1 <= top; ++x) {
        const double dx = a[static_cast<size_t>(x)] - a[static_cast<size_t>(x + 1)];
        const double dx1 = a[static_cast<size_t>(x + 1)] - a[static_cast<size_t>(x + 2)];
        worst = std::max(worst, dx - dx1);
    }
    return worst;
}

} // namespace flexq
