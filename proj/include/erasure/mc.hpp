#pragma once

#include <cstdint>

#include "erasure/windowing.hpp"

namespace erasure {

struct SimConfig {
    std::int64_t trials;
    std::uint64_t master_seed;
    ErrorModel error_model = ErrorModel::step;

    void validate() const;
};

struct SimReport {
    double mean_N;
    double stderr_N;
    double empirical_eeff;   // fraction of transmitted blocks in error
    double stderr_eeff;
    std::int64_t trials;
};

// Deterministic per-trial seed: SplitMix64 finalizer of
// master + (index + 1) * golden. Distinct indices map to distinct seeds for
// any fixed master (odd multiplier, bijective finalizer); identical inputs
// give identical outputs on every platform.
std::uint64_t derive_trial_seed(std::uint64_t master, std::int64_t index);

// Tiny fully-specified generator; trials never share state, so a small,
// cheaply-seedable engine is all that is needed.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// One estimate-then-transmit round per trial: Te erasure indicators drawn
// bit by bit, the realised rate, then deterministic (step) or Bernoulli
// (bound-model) block success. Payoff = Tt * rate * success.
// Bit-identical results for any `workers`; trials are seeded independently
// and reduced in index order.
SimReport simulate_ett(const Channel& ch, const EttConfig& cfg, const SimConfig& sim,
                       int workers = 1);

// One erasure sample path of the whole horizon per trial; each block's rate
// comes from the cumulative empirical erasure rate before it. Block 1 only
// explores.
SimReport simulate_window(const Channel& ch, const Schedule& s, double eeff,
                          const SimConfig& sim, int workers = 1);

}  // namespace erasure
