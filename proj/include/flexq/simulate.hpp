#ifndef FLEXQ_SIMULATE_HPP
#define FLEXQ_SIMULATE_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "flexq/solver.hpp"

namespace flexq {

/// SplitMix64: the documented, version-stable generator behind all
/// simulations.  Each replication r draws from an independent substream
/// seeded by mixing (seed, r), so estimates are reproducible bit-for-bit for
/// a fixed seed and config, independent of scheduling.
struct SplitMix64 {
    uint64_t state;

    explicit SplitMix64(uint64_t seed) : state(seed) {}

    uint64_t next() {
        state += 0x9E3779B97F4A7C15ull;
        uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    /// Uniform on (0, 1]; never returns 0 so -log stays finite.
    double uniform01() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

    double exponential(double rate) { return -std::log(uniform01()) / rate; }

    static SplitMix64 substream(uint64_t seed, uint64_t replication) {
        SplitMix64 mixer(seed ^ (0x632BE59BD9B4E019ull * (replication + 1)));
        return SplitMix64(mixer.next());
    }
};

struct SimConfig {
    uint64_t seed = 1;
    int replications = 1000;

    enum class Horizon { DiscountedEffective, TimeAverage };
    Horizon horizon = Horizon::DiscountedEffective;

    double epsilon_tail = 1e-4;  // discounted: relative tail-mass cutoff
    double time_horizon = 1000.0;  // average: simulated time per replication

    int x0 = 0;
    int i0 = 0;  // 1 = start at an arrival epoch (decision pending at t = 0)

    int batches = 32;              // average mode: batch-means count
    double warmup_fraction = 0.1;  // average mode: discarded prefix
};

struct SimEstimate {
    double mean = 0.0;
    double half_width_95 = 0.0;
    long replications_used = 0;
};

struct TraceRow {
    double t;
    std::string event;  // "arrival" or "departure"
    int x;              // state after the event
    char action_service;
    int action_admit;   // 1/0 at arrivals, -1 at departures
};

/// Unbiased estimate of the infinite-horizon discounted net profit under the
/// given threshold policy.  Event-driven with exponential clocks; holding
/// and service costs accrue in closed form over each constant-state interval,
/// so there is no time-discretization bias.  A replication stops once the
/// remaining discount mass bounds the tail below epsilon_tail relative to
/// the accumulated magnitude.
SimEstimate simulate_discounted(const ThresholdPolicy& policy, const ModelParams& model,
                                const SimConfig& cfg, std::vector<TraceRow>* trace = nullptr,
                                std::vector<std::string>* warnings = nullptr);

/// Batch-means estimate of the long-run average net profit per unit time,
/// discarding the warm-up prefix of each replication.
SimEstimate simulate_average(const ThresholdPolicy& policy, const ModelParams& model,
                             const SimConfig& cfg, std::vector<TraceRow>* trace = nullptr,
                             std::vector<std::string>* warnings = nullptr);

} // namespace flexq

#endif
