#include "flexq/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

namespace flexq {

namespace {

// Order-independent summation so parallel replication layouts cannot change
// the reported estimate.
double pairwise_sum(const double* a, size_t n) {
    if (n <= 8) {
        double s = 0.0;
        for (size_t i = 0; i < n; ++i) s += a[i];
        return s;
    }
    const size_t half = n / 2;
    return pairwise_sum(a, half) + pairwise_sum(a + half, n - half);
}

SimEstimate estimate_from(const std::vector<double>& obs, long reps) {
    SimEstimate e;
    e.replications_used = reps;
    const size_t n = obs.size();
    if (n == 0) return e;
    e.mean = pairwise_sum(obs.data(), n) / static_cast<double>(n);
    if (n >= 2) {
        std::vector<double> sq(n);
        for (size_t i = 0; i < n; ++i) sq[i] = (obs[i] - e.mean) * (obs[i] - e.mean);
        const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
        e.half_width_95 = 1.96 * std::sqrt(var / static_cast<double>(n));
    }
    return e;
}

void run_parallel(int replications, const std::function<void(int)>& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw <= 1 || replications < 256) {
        for (int r = 0; r < replications; ++r) body(r);
        return;
    }
    const unsigned nthreads = std::min<unsigned>(hw, 8);
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (unsigned t = 0; t < nthreads; ++t) {
        pool.emplace_back([&, t] {
            for (int r = static_cast<int>(t); r < replications; r += static_cast<int>(nthreads))
                body(r);
        });
    }
    for (auto& th : pool) th.join();
}

struct PolicyDynamics {
    const ThresholdPolicy& pol;
    const ModelParams& m;

    double service_rate(int x) const {
        if (x == 0) return 0.0;
        return pol.serves_low(x) ? m.mu_low : m.mu_high;
    }
    double cost_rate(int x) const {
        double g = m.holding(x);
        if (x >= 1 && !pol.serves_low(x)) g += m.service_cost;
        return g;
    }
    char service_char(int x) const { return pol.serves_low(x) ? 'l' : 'h'; }
};

} // namespace

SimEstimate simulate_discounted(const ThresholdPolicy& policy, const ModelParams& model,
                                const SimConfig& cfg, std::vector<TraceRow>* trace,
                                std::vector<std::string>* warnings) {
    model.validate();
    if (cfg.replications < 1) throw InvalidParameter("replications must be >= 1");
    if (!(cfg.epsilon_tail > 0.0 && cfg.epsilon_tail < 1.0))
        throw InvalidParameter("epsilon_tail must be in (0,1)");
    if (cfg.x0 < 0 || (cfg.i0 != 0 && cfg.i0 != 1))
        throw InvalidParameter("initial state must have x0 >= 0 and i0 in {0,1}");

    const bool reward_at_admission = policy.timing == RewardTiming::AtAdmission;
    const double beta = model.beta;
    const double R = model.reward;
    PolicyDynamics dyn{policy, model};

    if (warnings && !policy.b_admission.is_finite())
        warnings->push_back("unbounded admission threshold: the tail bound tracks the running "
                            "maximum state and is approximate");

    // Reachable-state cap for the tail bound; exact for finite admission
    // thresholds, adaptive otherwise.
    auto cap_state = [&](int current_max) {
        if (policy.b_admission.is_finite())
            return std::max(cfg.x0 + (cfg.i0 ? 1 : 0), policy.b_admission.value + 1);
        return current_max + 64;
    };

    std::vector<double> values(static_cast<size_t>(cfg.replications), 0.0);

    auto run_one = [&](int rep) {
        SplitMix64 rng = SplitMix64::substream(cfg.seed, static_cast<uint64_t>(rep));
        std::vector<TraceRow>* tr = (trace && rep == 0) ? trace : nullptr;

        int x = cfg.x0;
        double acc = 0.0;
        double disc = 1.0;  // e^{-beta t}
        double t = 0.0;
        int max_x = x;

        if (cfg.i0 == 1) {
            const bool admit = policy.admits(x);
            if (admit) {
                if (reward_at_admission) acc += R;
                ++x;
                max_x = std::max(max_x, x);
            }
            if (tr) tr->push_back({0.0, "arrival", x, dyn.service_char(x), admit ? 1 : 0});
        }

        const double reward_rate_bound = std::max(model.lambda, model.mu_high) * R;
        for (long guard = 0; guard < 200'000'000L; ++guard) {
            const double mu = dyn.service_rate(x);
            const double gamma = dyn.cost_rate(x);
            const double rate = model.lambda + mu;
            const double dt = rng.exponential(rate);
            const double disc_next = disc * std::exp(-beta * dt);
            acc -= gamma * (disc - disc_next) / beta;
            disc = disc_next;
            t += dt;

            const bool arrival = mu == 0.0 || rng.uniform01() * rate < model.lambda;
            if (arrival) {
                const bool admit = policy.admits(x);
                if (admit) {
                    if (reward_at_admission) acc += R * disc;
                    ++x;
                    max_x = std::max(max_x, x);
                }
                if (tr) tr->push_back({t, "arrival", x, dyn.service_char(x), admit ? 1 : 0});
            } else {
                --x;
                if (!reward_at_admission) acc += R * disc;
                if (tr) tr->push_back({t, "departure", x, dyn.service_char(x), -1});
            }

            const double tail =
                disc * (reward_rate_bound + model.service_cost + model.holding(cap_state(max_x))) / beta;
            if (tail <= cfg.epsilon_tail * (std::abs(acc) + 1.0)) break;
        }
        values[static_cast<size_t>(rep)] = acc;
    };

    run_parallel(cfg.replications, run_one);
    return estimate_from(values, cfg.replications);
}

SimEstimate simulate_average(const ThresholdPolicy& policy, const ModelParams& model,
                             const SimConfig& cfg, std::vector<TraceRow>* trace,
                             std::vector<std::string>* warnings) {
    model.validate();
    if (cfg.replications < 1) throw InvalidParameter("replications must be >= 1");
    if (!(cfg.time_horizon > 0.0)) throw InvalidParameter("time_horizon must be > 0");
    if (cfg.batches < 1) throw InvalidParameter("batches must be >= 1");
    if (!(cfg.warmup_fraction >= 0.0 && cfg.warmup_fraction < 1.0))
        throw InvalidParameter("warmup_fraction must be in [0,1)");

    if (warnings && !policy.b_admission.is_finite() && model.lambda > model.mu_high)
        warnings->push_back("unstable policy: unbounded admission with lambda > mu_high; "
                            "the time average may not exist");

    const bool reward_at_admission = policy.timing == RewardTiming::AtAdmission;
    const double R = model.reward;
    const double T = cfg.time_horizon;
    const double Tw = cfg.warmup_fraction * T;
    const int B = cfg.batches;
    const double batch_len = (T - Tw) / static_cast<double>(B);
    PolicyDynamics dyn{policy, model};

    std::vector<double> obs(static_cast<size_t>(cfg.replications) * static_cast<size_t>(B), 0.0);

    auto run_one = [&](int rep) {
        SplitMix64 rng = SplitMix64::substream(cfg.seed, static_cast<uint64_t>(rep));
        std::vector<TraceRow>* tr = (trace && rep == 0) ? trace : nullptr;
        double* batches = &obs[static_cast<size_t>(rep) * static_cast<size_t>(B)];

        auto add_amount = [&](double at, double amount) {
            if (at < Tw || at >= T) return;
            int k = static_cast<int>((at - Tw) / batch_len);
            k = std::min(k, B - 1);
            batches[k] += amount;
        };
        auto add_cost = [&](double t0, double t1, double gamma) {
            if (gamma == 0.0) return;
            t0 = std::max(t0, Tw);
            t1 = std::min(t1, T);
            while (t0 < t1) {
                int k = std::min(static_cast<int>((t0 - Tw) / batch_len), B - 1);
                double edge = std::min(t1, Tw + (k + 1) * batch_len);
                if (!(edge > t0)) edge = t1;  // rounding pinned us on a batch boundary
                batches[k] -= gamma * (edge - t0);
                t0 = edge;
            }
        };

        int x = cfg.x0;
        double t = 0.0;
        if (cfg.i0 == 1) {
            const bool admit = policy.admits(x);
            if (admit) {
                if (reward_at_admission) add_amount(0.0, R);
                ++x;
            }
            if (tr) tr->push_back({0.0, "arrival", x, dyn.service_char(x), admit ? 1 : 0});
        }

        while (t < T) {
            const double mu = dyn.service_rate(x);
            const double rate = model.lambda + mu;
            const double dt = rng.exponential(rate);
            const double t_next = t + dt;
            add_cost(t, std::min(t_next, T), dyn.cost_rate(x));
            if (t_next >= T) break;
            t = t_next;

            const bool arrival = mu == 0.0 || rng.uniform01() * rate < model.lambda;
            if (arrival) {
                const bool admit = policy.admits(x);
                if (admit) {
                    if (reward_at_admission) add_amount(t, R);
                    ++x;
                }
                if (tr) tr->push_back({t, "arrival", x, dyn.service_char(x), admit ? 1 : 0});
            } else {
                --x;
                if (!reward_at_admission) add_amount(t, R);
                if (tr) tr->push_back({t, "departure", x, dyn.service_char(x), -1});
            }
        }
        for (int k = 0; k < B; ++k) batches[k] /= batch_len;
    };

    run_parallel(cfg.replications, run_one);
    return estimate_from(obs, cfg.replications);
}

} // namespace flexq
