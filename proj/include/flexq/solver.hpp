#ifndef FLEXQ_SOLVER_HPP
#define FLEXQ_SOLVER_HPP

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flexq/model.hpp"

namespace flexq {

/// Integer threshold with a distinct ">= N" sentinel meaning the rule never
/// fires inside the truncation (serialized as "inf").  value >= -1 otherwise;
/// -1 means the rule fires nowhere (reject everything / serve low only at 0).
struct Threshold {
    int value = -1;
    bool unbounded = false;

    static Threshold finite(int v) { return Threshold{v, false}; }
    static Threshold at_least(int n) { return Threshold{n, true}; }

    bool is_finite() const { return !unbounded; }
    /// True when the rule applies at state x ("x <= threshold").
    bool covers(int x) const { return unbounded || x <= value; }

    bool operator==(const Threshold& o) const {
        return unbounded == o.unbounded && (unbounded || value == o.value);
    }
    bool operator!=(const Threshold& o) const { return !(*this == o); }

    std::string to_string() const { return unbounded ? "inf" : std::to_string(value); }
};

/// Stationary two-threshold rule: serve low iff x <= b_service (always at
/// x=0), admit iff x <= b_admission.  AdmissionOnly policies keep b_service
/// at the unbounded sentinel (the low rate is never left).
struct ThresholdPolicy {
    Threshold b_service = Threshold::at_least(0);
    Threshold b_admission = Threshold::finite(-1);
    ProblemVariant variant = ProblemVariant::Combined;
    RewardTiming timing = RewardTiming::AtAdmission;

    bool serves_low(int x) const { return x == 0 || b_service.covers(x); }
    bool admits(int x) const { return b_admission.covers(x); }

    bool operator==(const ThresholdPolicy& o) const {
        return b_service == o.b_service && b_admission == o.b_admission;
    }
};

/// Value function on the truncated state space (x = 0..x_max, i in {0,1}).
/// v0 holds the departure-epoch component v(x,0), v1 the arrival-epoch
/// component v(x,1).  Values are in original time units (no normalization).
struct ValueFunction {
    std::vector<double> v0, v1;
    ProblemVariant variant = ProblemVariant::Combined;
    RewardTiming timing = RewardTiming::AtAdmission;
    TruncationSpec trunc;

    bool infinite_horizon = false;
    int finite_steps = 0;     // n for finite-horizon iterates
    double residual = 0.0;    // final sup-norm step for fixed-point solves
    long iterations = 0;
    std::vector<std::string> warnings;

    int x_max() const { return static_cast<int>(v0.size()) - 1; }
    double at(int x, int i) const { return i == 0 ? v0[static_cast<size_t>(x)] : v1[static_cast<size_t>(x)]; }
};

/// First differences delta(x,i) = v(x,i) - v(x+1,i) on x = 0..x_max-1.
/// The (.,0) component drives both thresholds.
struct BurdenFunction {
    std::vector<double> d0, d1;
    int x_max() const { return static_cast<int>(d0.size()); }
};

/// Exact value of a fixed threshold policy (solved linear system).
struct PolicyValue {
    ValueFunction values;
    ThresholdPolicy policy;
};

/// Policy value in relative (anchored) form: w(x,i) = v(x,i) - v(0,0) and
/// gain g = beta * v(0,0).  Numerically stable for arbitrarily small beta,
/// where the raw values blow up like g/beta.
struct AnchoredPolicyValue {
    std::vector<double> w0, w1;
    double g = 0.0;
    ThresholdPolicy policy;
    int x_max() const { return static_cast<int>(w0.size()) - 1; }
};

/// Per-state actions on the truncation (admit[x] meaningful for x < x_max).
struct ActionTable {
    std::vector<uint8_t> admit;
    std::vector<uint8_t> serve_low;
};

struct SolveOptions {
    double tol = 1e-9;
    long max_iters = 50'000'000;
    bool check_truncation = true;  // throw TruncationTooTight on edge-landing thresholds
};

/// T_f(theta) = sup{k >= 0 : f(k) <= theta} with sup(empty) = -1.  Returns
/// the ">= N" sentinel when f(N) <= theta at the end of the range, so callers
/// can grow the truncation.
Threshold threshold_T(std::span<const double> f, double theta);

/// Finite-horizon backward recursion from v_0 = 0; returns v_0..v_n.
std::vector<ValueFunction> finite_horizon_iterate(const ModelParams& model, int n_steps,
                                                  TruncationSpec trunc,
                                                  ProblemVariant variant = ProblemVariant::Combined,
                                                  std::optional<RewardTiming> timing = std::nullopt);

/// Infinite-horizon discounted solve by value iteration.  Stops when the
/// sup-norm step is <= tol*(1-alpha)/alpha, which bounds the true-value
/// error by tol.  Throws NoConvergence past max_iters and (optionally)
/// TruncationTooTight when an extracted threshold lands within
/// trunc.safety_margin of x_max.
ValueFunction solve_discounted(const ModelParams& model, TruncationSpec trunc,
                               double tol, long max_iters,
                               ProblemVariant variant = ProblemVariant::Combined,
                               std::optional<RewardTiming> timing = std::nullopt,
                               bool check_truncation = true,
                               const ValueFunction* warm_start = nullptr);

struct SolveResult {
    ValueFunction value;
    BurdenFunction burden;
    ThresholdPolicy policy;
};

/// solve_discounted with the truncation doubled (from trunc.x_max up to
/// max_x_max) until both thresholds clear the safety margin.
SolveResult solve_adaptive(const ModelParams& model, TruncationSpec trunc, double tol,
                           long max_iters = SolveOptions{}.max_iters,
                           ProblemVariant variant = ProblemVariant::Combined,
                           std::optional<RewardTiming> timing = std::nullopt,
                           int max_x_max = 8192);

BurdenFunction burden_of(const ValueFunction& v);

/// Thresholds from the burden's (.,0) component:
///   reward at admission:  b_service = 1 + T(c/delta),      b_admission = T(R)
///   reward at departure:  b_service = 1 + T(c/delta - R),  b_admission = T(0)
/// Requires delta(.,0) nondecreasing away from the truncation edge
/// (NonMonotoneBurden otherwise).  Near-tie burdens are reported as warnings.
ThresholdPolicy extract_thresholds(const BurdenFunction& burden, const ModelParams& model,
                                   ProblemVariant variant, RewardTiming timing,
                                   int safety_margin = 8, double tol = 1e-9,
                                   std::vector<std::string>* warnings = nullptr);

/// Exact policy evaluation: the (.,0) system is tridiagonal in x (admission
/// couples upward, service downward) and is solved directly; (.,1) follows by
/// substitution.  States above x_max are closed by forced rejection.
PolicyValue evaluate_threshold_policy(const ThresholdPolicy& policy, const ModelParams& model,
                                      TruncationSpec trunc);

/// Policy evaluation in anchored form (see AnchoredPolicyValue).  The gain
/// unknown makes the system tridiagonal plus one dense column, handled with
/// a rank-1 update.
AnchoredPolicyValue evaluate_policy_anchored(const ThresholdPolicy& policy, const ModelParams& model,
                                             TruncationSpec trunc);

/// Greedy actions read off a converged value function (ties: admit, low).
ActionTable greedy_actions(const ValueFunction& v, const ModelParams& model);

/// Greedy actions from anchored relative values (shift-invariant).
ActionTable greedy_actions_anchored(const AnchoredPolicyValue& w, const ModelParams& model,
                                    RewardTiming timing);

/// The action table a threshold policy prescribes on 0..x_max.
ActionTable policy_actions(const ThresholdPolicy& policy, int x_max);

// --- structural checks (worst violation; <= 0 means the property holds) ---

/// Value monotonicity: v(x,i) - v(x+1,i) >= 0, edge excluded.
double max_monotonicity_violation(const ValueFunction& v, int component, int safety_margin);

/// Concavity via burden monotonicity: delta(x+1,i) >= delta(x,i), edge excluded.
double max_concavity_violation(const ValueFunction& v, int component, int safety_margin);

} // namespace flexq

#endif
