#pragma once

#include <cstdint>
#include <vector>

#include "erasure/ett.hpp"

namespace erasure {

enum class ScheduleKind { geometric, arithmetic, custom };

// A partition of the horizon into M >= 2 transmission blocks. Block i >= 2
// transmits at a rate set from the cumulative erasure estimate over the
// preceding S_{i-1} bits; block 1 has no estimate and only explores.
struct Schedule {
    std::vector<std::int64_t> blocks;
    ScheduleKind kind = ScheduleKind::custom;

    std::int64_t M() const { return static_cast<std::int64_t>(blocks.size()); }
    std::int64_t total() const;
    void validate() const;
};

struct BlockResult {
    std::int64_t S_prev;  // cumulative bits before this block
    double backoff;       // +inf for block 1
    double contribution;  // expected successfully-decoded bits
};

struct WindowReport {
    double N_total;
    std::vector<BlockResult> per_block;
    std::int64_t queries;  // always M - 1
};

// Doubling block sizes 1, 2, 4, ..., 2^(M-1); total horizon 2^M - 1.
Schedule make_geometric(std::int64_t M);

// Blocks starting at 1 with real common difference d = 2(T - M)/(M(M - 1)),
// each rounded to nearest; the rounding residual lands in the final block so
// the total is exactly T.
Schedule make_arithmetic(std::int64_t T, std::int64_t M);

Schedule make_custom(std::vector<std::int64_t> blocks);

// Per-block backoffs b_i = sqrt(delta(1-delta)/S_{i-1}) Qinv(eeff); b_1 is
// +inf (block 1 transmits nothing).
std::vector<double> window_backoffs(const Channel& ch, const Schedule& s, double eeff);

// Step-exact expected throughput, block by block. Block i behaves like an
// estimate-then-transmit pair with Te = S_{i-1}, Tt = T_i; only the marginal
// law of the cumulative erasure count enters each block's expectation.
WindowReport window_throughput_exact(const Channel& ch, const Schedule& s, double eeff);

// Gaussian closed form per block:
//   T_i ((1-delta)(1-eeff) - sqrt(delta(1-delta)/S_{i-1}) G(eeff)),
// clamped at zero, with G = Qinv(eeff)(1-eeff) + exp(-Qinv(eeff)^2/2)/sqrt(2 pi).
WindowReport window_throughput_gauss(const Channel& ch, const Schedule& s, double eeff);

// Expected throughput with a finite-blocklength bound as the per-block error.
WindowReport window_throughput_ppv(const Channel& ch, const Schedule& s, double eeff,
                                   ErrorModel model);

// Average per-block error probability under the step model (what the
// simulator's empirical_eeff estimates).
double window_eeff_step_exact(const Channel& ch, const Schedule& s, double eeff);

// Closed-form bounds on the geometric-windowing throughput at T = 2^M - 1.
BoundPair geometric_bounds(const Channel& ch, std::int64_t M, double eeff);

}  // namespace erasure
