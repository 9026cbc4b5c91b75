#pragma once

#include <cstdint>
#include <span>

#include "erasure/numerics.hpp"

namespace erasure {

// Binary erasure channel with per-bit erasure probability delta.
struct Channel {
    double delta;

    void validate() const;
};

// One operating point: blocklength n, rate r in information bits per use.
struct CodePoint {
    std::int64_t n;
    double r;

    void validate() const;
};

struct BoundPair {
    double lower;
    double upper;
};

// Achievability bound on the block error probability:
//   sum_t pmf(n, t, delta) * 2^(-[n(1-r) - t]^+).
double eps_upper(const Channel& ch, const CodePoint& cp);

// Converse bound on the block error probability:
//   sum_{t > floor(n(1-r))} pmf(n, t, delta) * (1 - 2^(n(1-r) - t)).
double eps_lower(const Channel& ch, const CodePoint& cp);

// Both bounds; throws consistency_error if ordering is violated beyond 1e-12.
BoundPair eps_bounds(const Channel& ch, const CodePoint& cp);

// Best achievable rate at blocklength n and block error eeff under the
// normal approximation, (1 - delta) - sqrt(delta(1-delta)/n) Qinv(eeff),
// with the O(1)/n term dropped; clamped to [0, 1].
double oracle_rate(const Channel& ch, std::int64_t n, double eeff);

// Expected successfully-decoded bits for a delta-aware transmitter over a
// horizon of T uses: T * oracle_rate * (1 - eeff).
double oracle_throughput(const Channel& ch, std::int64_t T, double eeff);

// Oracle throughput minus strategy throughput; may come out negative because
// the oracle drops its O(1)/n term, and is reported as-is.
double regret(double n_strategy, double n_oracle);

namespace detail {

// Bound evaluators on a precomputed log-pmf row (batch use by the ett module).
double eps_upper_pmf(std::span<const double> log_pmf, double r);
double eps_lower_pmf(std::span<const double> log_pmf, double r);

}  // namespace detail

}  // namespace erasure
