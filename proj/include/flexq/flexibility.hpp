#ifndef FLEXQ_FLEXIBILITY_HPP
#define FLEXQ_FLEXIBILITY_HPP

#include <span>
#include <string>
#include <vector>

#include "flexq/solver.hpp"

namespace flexq {

enum class FlexVerdict {
    FlexValueless,  // b_service >= b_admission + 1: the switch option is never
                    // exercised while customers are still being admitted
    FlexActive,     // b_service <= b_admission
};

std::string to_string(FlexVerdict v);

/// Side-by-side solve of the combined and admission-only problems on a common
/// truncation.  epsilon = v - v_hat is the value of the rate-switch option.
struct FlexibilityReport {
    std::vector<double> eps0, eps1;       // epsilon(x,i)
    double relative_at_origin = 0.0;      // eps(0,0) / v_hat(0,0)
    bool relative_is_absolute = false;    // set when v_hat(0,0) <= 0 and eps(0,0) is reported instead
    ThresholdPolicy thresholds_combined;
    Threshold threshold_admission_only;   // b_admission of the restricted problem
    FlexVerdict verdict = FlexVerdict::FlexValueless;
    ValueFunction combined, admission_only;
    std::vector<std::string> warnings;
};

FlexibilityReport flexibility(const ModelParams& model, TruncationSpec trunc, double tol = 1e-9);

/// One evaluated point of a reward scan.
struct CriticalScanPoint {
    double reward;
    FlexVerdict verdict;
};

struct CriticalRewardResult {
    double r_tilde = 0.0;       // largest scanned reward that is still valueless
    double bracket_low = 0.0;   // bisection-refined bracket around the verdict flip
    double bracket_high = 0.0;
    std::vector<CriticalScanPoint> scan;
    std::vector<std::string> warnings;
};

/// Thrown by critical_reward when the scan never changes verdict; carries the
/// scan so callers can still inspect it.
class NoCrossingInRange : public Error {
public:
    NoCrossingInRange(const std::string& msg, std::vector<CriticalScanPoint> scan)
        : Error(msg), scan(std::move(scan)) {}
    std::vector<CriticalScanPoint> scan;
};

/// Scans rewards in [r_min, r_max] at the given resolution, confirms a single
/// verdict change, then bisects the flip interval.  The scan is always
/// produced in full first; bisection only refines a confirmed single change.
CriticalRewardResult critical_reward(const ModelParams& base, double r_min, double r_max,
                                     double resolution, TruncationSpec trunc, double tol = 1e-9);

struct AverageRewardOptions {
    double beta0 = 1.0;
    double shrink = 0.5;
    double stop_tol = 1e-6;
    int max_stages = 30;
    double spread_tol = 1e-4;   // cap on beta*|w| across the sampled states
    double tol = 1e-9;          // per-stage discounted solve tolerance
    double vi_floor = 1e-4;     // below this beta, stages rely on the exact
                                // anchored evaluation + greedy certificate only
};

/// Vanishing-discount result.  g_star is the profit rate per unit time;
/// relative values w(x,i) = v_beta(x,i) - v_beta(0,0) at the final stage.
struct AverageRewardResult {
    double g_star = 0.0;
    std::vector<double> beta_sequence;
    std::vector<double> g_trace;          // beta_n * v_{beta_n}(0,0) per stage
    std::vector<double> w0, w1;           // relative values at the final beta
    ThresholdPolicy policy;
    bool stabilized = false;
    double max_residual = 0.0;            // worst optimality-inequality violation at (w, g)
    double spread = 0.0;                  // max |beta*w| over the sampled states
    int stages_used = 0;
    TruncationSpec trunc;
    std::vector<std::string> warnings;
};

/// Solves the discounted problem along beta_n = beta0 * shrink^n and stops
/// once the gain trace, the thresholds, the optimality-inequality residuals
/// and the sampled-state spread have all settled.  Throws NotStabilized when
/// max_stages runs out first.
AverageRewardResult average_reward(const ModelParams& model, TruncationSpec trunc,
                                   AverageRewardOptions opts = {});

enum class SweepAxis { Reward, ServiceCost, MuHigh, Lambda, Beta };

SweepAxis sweep_axis_from_string(const std::string& name);
std::string to_string(SweepAxis axis);

struct SweepRow {
    double value = 0.0;
    Threshold b_service, b_admission, b_admission_only;
    double rel_flex = 0.0;
    bool rel_is_absolute = false;
    FlexVerdict verdict = FlexVerdict::FlexValueless;
    std::string error;  // non-empty when this row failed; the sweep continues
};

/// One flexibility run per value; rows come back sorted by value.
std::vector<SweepRow> sweep(const ModelParams& base, SweepAxis axis,
                            std::span<const double> values, TruncationSpec trunc,
                            double tol = 1e-9);

} // namespace flexq

#endif
