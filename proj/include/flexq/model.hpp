#ifndef FLEXQ_MODEL_HPP
#define FLEXQ_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "flexq/errors.hpp"

namespace flexq {

// When the per-customer reward R is collected.
enum class RewardTiming { AtAdmission, AtDeparture };

// Combined = joint admission + service-rate control.
// AdmissionOnly = service rate frozen at mu_low, admission controlled.
enum class ProblemVariant { Combined, AdmissionOnly };

/// Holding cost rate h(x), required to be nondecreasing and convex with h(0)=0.
///
/// Exponential uses the offset form h(x) = K(rho^x - 1): it keeps the
/// geometric growth while honoring the h(0)=0 normalization.
/// Tabular extrapolates linearly past the table end with the last slope,
/// which preserves convexity; at() reports whether a query extrapolated.
class HoldingCost {
public:
    enum class Kind { Power, Exponential, Tabular };

    static HoldingCost power(double K, double m);
    static HoldingCost exponential(double K, double rho);
    static HoldingCost tabular(std::vector<double> values);

    Kind kind() const { return kind_; }
    double K() const { return K_; }
    double m() const { return m_; }
    double rho() const { return rho_; }
    const std::vector<double>& table() const { return table_; }

    /// h(x); tabular queries past the end extrapolate linearly.
    double at(int x) const;
    double operator()(int x) const { return at(x); }

    /// h(x) without extrapolation; throws TabularOutOfRange past the table end.
    double at_strict(int x) const;

    /// True when at(x) would read past a tabular cost's data.
    bool extrapolates(int x) const;

    /// Throws NonConvexCost / InvalidParameter on malformed parameters.
    void validate() const;

    std::string describe() const;

private:
    Kind kind_ = Kind::Power;
    double K_ = 1.0;
    double m_ = 1.0;
    double rho_ = 2.0;
    std::vector<double> table_;
};

/// Problem instance: M/M/1 with arrival rate lambda, switchable service rate
/// mu_low/mu_high, reward R per admitted customer, holding cost rate h(x),
/// service overhead rate c while the high rate is in use, discount rate beta.
struct ModelParams {
    double lambda = 1.0;
    double mu_low = 1.0;
    double mu_high = 2.0;
    double service_cost = 0.0;  // c = c_h - c_l after the c_l = 0 normalization
    double reward = 0.0;        // R
    double beta = 1.0;
    HoldingCost holding = HoldingCost::power(1.0, 2.0);
    RewardTiming timing = RewardTiming::AtAdmission;

    double delta() const { return mu_high - mu_low; }
    double uniform_rate() const { return lambda + mu_high; }  // Lambda
    double c_over_delta() const { return service_cost / delta(); }

    /// Throws InvalidParameter on bad rates; validates the holding cost too.
    void validate() const;

    ModelParams with_reward(double R) const { ModelParams m = *this; m.reward = R; return m; }
    ModelParams with_service_cost(double c) const { ModelParams m = *this; m.service_cost = c; return m; }
    ModelParams with_mu_high(double mu) const { ModelParams m = *this; m.mu_high = mu; return m; }
    ModelParams with_lambda(double l) const { ModelParams m = *this; m.lambda = l; return m; }
    ModelParams with_beta(double b) const { ModelParams m = *this; m.beta = b; return m; }
};

/// Discrete-time equivalent obtained by dividing all rates by Lambda + beta.
/// The per-period transition probabilities and the discrete discount factor
/// alpha = Lambda/(Lambda+beta); cost rates are scaled by 1/(Lambda+beta) per
/// period. Equivalent to the usual "normalize so Lambda+beta=1" convention,
/// but keeps values in the original time units.
struct UniformizedModel {
    double p_arrival;       // lambda/(Lambda+beta)
    double p_low_service;   // mu_low/(Lambda+beta)
    double p_extra_service; // delta/(Lambda+beta)
    double p_self_empty;    // mu_high/(Lambda+beta), self-loop at the empty state
    double alpha;           // Lambda/(Lambda+beta)
    double cost_scale;      // 1/(Lambda+beta)
};

UniformizedModel uniformize(const ModelParams& model);

/// State-space truncation: states 0..x_max, with arrivals force-rejected at
/// x_max. safety_margin is the minimum gap required between any extracted
/// threshold and x_max before results are trusted.
struct TruncationSpec {
    int x_max = 64;
    int safety_margin = 8;

    void validate() const {
        if (x_max < safety_margin + 2)
            throw InvalidParameter("truncation: x_max must be >= safety_margin + 2");
        if (x_max < 2 || safety_margin < 0)
            throw InvalidParameter("truncation: x_max >= 2 and safety_margin >= 0 required");
    }
};

/// Outcome of checking the holding-cost growth conditions on the normalized
/// time scale (rates divided by Lambda+beta, so the normalized uniform rate
/// is alpha < 1).  theta is the growth constant of condition (i); J and
/// alpha_bound witness condition (ii) with the smallest J found.
struct Assumption1Verdict {
    bool holds = false;
    double theta = 0.0;
    long long J = 0;
    double alpha_bound = 0.0;
    bool finite_prefix_only = false;  // tabular costs: verified on the table prefix
    std::string reason;               // populated when holds is false
};

/// Non-throwing check; holds=false carries the reason.
Assumption1Verdict try_validate_assumption1(const HoldingCost& h, const ModelParams& model);

/// Throwing form: AssumptionViolated when the condition provably fails.
Assumption1Verdict validate_assumption1(const HoldingCost& h, const ModelParams& model);

} // namespace flexq

#endif
