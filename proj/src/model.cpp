#include "flexq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flexq {

HoldingCost HoldingCost::power(double K, double m) {
    HoldingCost h;
    h.kind_ = Kind::Power;
    h.K_ = K;
    h.m_ = m;
    return h;
}

HoldingCost HoldingCost::exponential(double K, double rho) {
    HoldingCost h;
    h.kind_ = Kind::Exponential;
    h.K_ = K;
    h.rho_ = rho;
    return h;
}

HoldingCost HoldingCost::tabular(std::vector<double> values) {
    HoldingCost h;
    h.kind_ = Kind::Tabular;
    h.table_ = std::move(values);
    return h;
}

double HoldingCost::at(int x) const {
    if (x < 0) throw InvalidParameter("holding cost queried at negative x");
    switch (kind_) {
    case Kind::Power:
        return K_ * std::pow(static_cast<double>(x), m_);
    case Kind::Exponential:
        return K_ * (std::pow(rho_, static_cast<double>(x)) - 1.0);
    case Kind::Tabular: {
        const auto n = static_cast<int>(table_.size());
        if (x < n) return table_[static_cast<size_t>(x)];
        // linear extrapolation with the last slope keeps convexity
        const double slope = table_[n - 1] - table_[n - 2];
        return table_[n - 1] + slope * (x - (n - 1));
    }
    }
    return 0.0;
}

double HoldingCost::at_strict(int x) const {
    if (kind_ == Kind::Tabular && x >= static_cast<int>(table_.size())) {
        std::ostringstream os;
        os << "tabular holding cost has " << table_.size() << " entries, queried at x=" << x;
        throw TabularOutOfRange(os.str());
    }
    return at(x);
}

bool HoldingCost::extrapolates(int x) const {
    return kind_ == Kind::Tabular && x >= static_cast<int>(table_.size());
}

void HoldingCost::validate() const {
    switch (kind_) {
    case Kind::Power:
        if (!(K_ > 0.0)) throw InvalidParameter("power holding cost requires K > 0");
        if (!(m_ >= 1.0)) throw InvalidParameter("power holding cost requires m >= 1");
        break;
    case Kind::Exponential:
        if (!(K_ > 0.0)) throw InvalidParameter("exponential holding cost requires K > 0");
        if (!(rho_ > 1.0)) throw InvalidParameter("exponential holding cost requires rho > 1");
        break;
    case Kind::Tabular: {
        if (table_.size() < 2)
            throw InvalidParameter("tabular holding cost needs at least two entries");
        if (table_.front() != 0.0)
            throw NonConvexCost("tabular holding cost must start at h(0) = 0");
        for (size_t i = 1; i < table_.size(); ++i)
            if (table_[i] < table_[i - 1])
                throw NonConvexCost("tabular holding cost must be nondecreasing");
        for (size_t i = 1; i + 1 < table_.size(); ++i)
            if (table_[i + 1] - table_[i] < table_[i] - table_[i - 1] - 1e-12)
                throw NonConvexCost("tabular holding cost must be convex");
        if (table_.back() <= 0.0)
            throw NonConvexCost("tabular holding cost must be increasing, not identically zero");
        break;
    }
    }
}

std::string HoldingCost::describe() const {
    std::ostringstream os;
    switch (kind_) {
    case Kind::Power: os << "power(K=" << K_ << ", m=" << m_ << ")"; break;
    case Kind::Exponential: os << "exponential(K=" << K_ << ", rho=" << rho_ << ")"; break;
    case Kind::Tabular: os << "tabular(" << table_.size() << " entries)"; break;
    }
    return os.str();
}

void ModelParams::validate() const {
    if (!(lambda > 0.0)) throw InvalidParameter("lambda must be > 0");
    if (!(mu_low > 0.0)) throw InvalidParameter("mu_low must be > 0");
    if (!(mu_high > mu_low)) throw InvalidParameter("mu_high must be > mu_low");
    if (!(service_cost >= 0.0)) throw InvalidParameter("service_cost must be >= 0");
    if (!(reward >= 0.0)) throw InvalidParameter("reward must be >= 0");
    if (!(beta > 0.0)) throw InvalidParameter("beta must be > 0");
    if (!std::isfinite(lambda) || !std::isfinite(mu_high) || !std::isfinite(beta) ||
        !std::isfinite(service_cost) || !std::isfinite(reward))
        throw InvalidParameter("model parameters must be finite");
    holding.validate();
}

UniformizedModel uniformize(const ModelParams& model) {
    model.validate();
    const double D = model.uniform_rate() + model.beta;
    UniformizedModel u;
    u.p_arrival = model.lambda / D;
    u.p_low_service = model.mu_low / D;
    u.p_extra_service = model.delta() / D;
    u.p_self_empty = model.mu_high / D;
    u.alpha = model.uniform_rate() / D;
    u.cost_scale = 1.0 / D;
    return u;
}

namespace {

// sup over integer x >= 0 of (A + h(x+J)) / (A + h(x)), family-aware.
// A > 0 is required by the caller.
double growth_ratio_sup(const HoldingCost& h, double A, long long J) {
    switch (h.kind()) {
    case HoldingCost::Kind::Exponential: {
        // Moebius function of t = rho^x: monotone, so the sup is attained at
        // x = 0 or in the x -> infinity limit rho^J.
        const double lr = static_cast<double>(J) * std::log(h.rho());
        const double lim = lr > 700.0 ? std::numeric_limits<double>::infinity() : std::exp(lr);
        const double at0 = (A + h.K() * (lim - 1.0)) / A;
        return std::max(lim, at0);
    }
    case HoldingCost::Kind::Power: {
        // The ratio is unimodal in x with its peak below
        // x* = ((m-1)A/K)^(1/m) and decreasing beyond, so scanning a little
        // past x* captures the exact sup.
        const double m = h.m(), K = h.K();
        double xstar = m > 1.0 ? std::pow((m - 1.0) * A / K, 1.0 / m) : 0.0;
        long long hi = static_cast<long long>(std::ceil(xstar)) + 8;
        hi = std::min(hi, static_cast<long long>(200000));
        double sup = 0.0;
        for (long long x = 0; x <= hi; ++x) {
            const double num = A + K * std::pow(static_cast<double>(x + J), m);
            const double den = A + K * std::pow(static_cast<double>(x), m);
            sup = std::max(sup, num / den);
        }
        return sup;
    }
    case HoldingCost::Kind::Tabular: {
        double sup = 0.0;
        const long long hi = static_cast<long long>(h.table().size()) + J + 64;
        for (long long x = 0; x <= hi; ++x)
            sup = std::max(sup, (A + h.at(static_cast<int>(x + J))) / (A + h.at(static_cast<int>(x))));
        return sup;
    }
    }
    return std::numeric_limits<double>::infinity();
}

} // namespace

Assumption1Verdict try_validate_assumption1(const HoldingCost& h, const ModelParams& model) {
    h.validate();
    model.validate();

    Assumption1Verdict v;
    const double A = model.reward + model.service_cost;
    // Normalized uniform rate (rates rescaled so Lambda + beta = 1).
    const double lam_norm = model.uniform_rate() / (model.uniform_rate() + model.beta);

    // Condition (i): a finite theta with h(x+1) <= theta h(x) for x > 0.
    switch (h.kind()) {
    case HoldingCost::Kind::Power:
        v.theta = std::pow(2.0, h.m());  // ratio h(2)/h(1); decreasing in x for power costs
        break;
    case HoldingCost::Kind::Exponential:
        v.theta = h.rho() + 1.0;  // sup of (rho^{x+1}-1)/(rho^x-1), attained at x = 1
        break;
    case HoldingCost::Kind::Tabular: {
        v.finite_prefix_only = true;
        double theta = 1.0;
        for (size_t x = 1; x + 1 < h.table().size(); ++x) {
            const double hx = h.table()[x], hx1 = h.table()[x + 1];
            if (hx == 0.0 && hx1 > 0.0) {
                v.reason = "tabular cost jumps from zero: no finite growth constant";
                return v;
            }
            if (hx > 0.0) theta = std::max(theta, hx1 / hx);
        }
        v.theta = theta;
        break;
    }
    }

    if (A <= 0.0) {
        v.reason = "reward + service_cost = 0 makes the growth bound fail at x = 0";
        return v;
    }
    if (h.kind() == HoldingCost::Kind::Exponential && h.rho() * lam_norm >= 1.0) {
        std::ostringstream os;
        os << "exponential cost needs rho < " << 1.0 / lam_norm << " (normalized), got rho = " << h.rho();
        v.reason = os.str();
        return v;
    }

    // Condition (ii): smallest J with lam_norm^J * sup_x ratio < 1.
    const long long kMaxJ = 4000;
    for (long long J = 1; J <= kMaxJ; ++J) {
        const double s = std::pow(lam_norm, static_cast<double>(J)) * growth_ratio_sup(h, A, J);
        if (s < 1.0) {
            v.holds = true;
            v.J = J;
            v.alpha_bound = s;
            return v;
        }
    }
    // Power costs always satisfy the condition eventually; past the scan cap
    // report the conservative bound instead of scanning astronomically far.
    if (h.kind() == HoldingCost::Kind::Power) {
        // Solve lam_norm^J * (1 + K(2J)^m / A) < 1 by doubling; log-space.
        const double llam = std::log(lam_norm);
        long long J = kMaxJ;
        for (int step = 0; step < 200; ++step) {
            const double bound = std::log1p(h.K() * std::pow(2.0 * static_cast<double>(J), h.m()) / A);
            if (static_cast<double>(J) * llam + bound < 0.0) {
                v.holds = true;
                v.J = J;
                v.alpha_bound = std::exp(static_cast<double>(J) * llam + bound);
                return v;
            }
            J *= 2;
        }
    }
    v.reason = "no witness J found within the scan limit";
    return v;
}

Assumption1Verdict validate_assumption1(const HoldingCost& h, const ModelParams& model) {
    Assumption1Verdict v = try_validate_assumption1(h, model);
    if (!v.holds) throw AssumptionViolated("holding-cost growth condition fails: " + v.reason);
    return v;
}

} // namespace flexq
