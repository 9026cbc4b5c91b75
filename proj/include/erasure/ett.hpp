#pragma once

#include <cstdint>

#include "erasure/fbl.hpp"

namespace erasure {

// Estimate-then-transmit split of a horizon of T channel uses: Te pilot bits,
// one erasure-rate query, then one transmission block of Tt = T - Te bits at
// rate max(0, 1 - estimate - b).
struct EttConfig {
    std::int64_t T;
    std::int64_t Te;
    double b;

    std::int64_t Tt() const { return T - Te; }
    void validate() const;
};

// Which block-error model the evaluators and the simulator plug in.
enum class ErrorModel { step, ppv_upper, ppv_lower, ppv_mid };

// Everything the CLI reports for one estimate-then-transmit configuration.
struct EttReport {
    double eeff_exact;    // binomial-exact block error under the step model
    double eeff_gauss;    // Gaussian closed form Q(b sqrt(Te / (delta(1-delta))))
    double N_exact;       // step-exact expected throughput
    double N_gauss;       // Gaussian closed-form throughput
    double N_ppv_lower;   // throughput lower bound (achievability bound as error)
    double N_ppv_upper;   // throughput upper bound (converse bound as error)
    double regret_step;   // oracle at eeff_gauss minus N_exact
};

// Result of the per-Te error-rate optimisation. interior == false means the
// maximum sits on the b = 0 boundary (eeff = 1/2) rather than at a zero of
// the derivative.
struct OptimalEeff {
    double eeff;
    bool interior;
};

struct JointOptimum {
    std::int64_t Te;
    double eeff;
    bool converged;
    int rounds;
};

// Rate chosen after observing k erasures in Te pilots: max(0, 1 - k/Te - b).
double rate_decision(std::int64_t Te, std::int64_t k, double b);

// Smallest pilot erasure count whose induced rate decodes under the step
// model; counts below it err. Ties on the capacity boundary decode, and
// near-integer products Te (delta - b) are snapped so the convention is
// stable for rational delta.
std::int64_t step_success_k_min(const Channel& ch, std::int64_t Te, double b);

// Expected block error with a finite-blocklength bound plugged in for the
// error probability. `model` must be ppv_upper or ppv_lower.
double eeff_ppv(const Channel& ch, const EttConfig& cfg, ErrorModel model);

// Exact block error under the step model: P(K < Te (delta - b)), K ~ Bin(Te, delta).
// The boundary is strict: an estimate landing exactly on capacity decodes.
double eeff_step_exact(const Channel& ch, std::int64_t Te, double b);

// Gaussian closed form for the same quantity.
double eeff_step_gauss(const Channel& ch, std::int64_t Te, double b);

// Inverse of eeff_step_gauss in b; requires 0 < eeff <= 1/2 so that b >= 0.
double backoff_for_eeff(const Channel& ch, std::int64_t Te, double eeff);

// Step-exact expected throughput: Tt * sum_k rate(k) pmf(k) over the
// no-error region of k.
double throughput_step_exact(const Channel& ch, const EttConfig& cfg);

// Expected throughput with the chosen error model plugged in per realised
// rate. Passing ppv_upper yields the throughput lower bound and vice versa;
// ppv_mid averages the two bounds; step delegates to throughput_step_exact.
double throughput_ppv(const Channel& ch, const EttConfig& cfg, ErrorModel model);

// Gaussian closed-form throughput:
//   Tt ((1−δ−b)(1−ε(b)) − sqrt(δ(1−δ)/(2π Te)) e^{−x²/2}),  x = b sqrt(Te/(δ(1−δ))).
// Can go negative for tiny Te; reported as-is.
double throughput_gauss(const Channel& ch, const EttConfig& cfg);

// Stationarity residual of the closed-form throughput in Te at fixed eeff,
// with the backoff recomputed from eeff at every Te (positive left of the
// optimum, negative right of it).
double optimal_te_residual(const Channel& ch, std::int64_t T, double eeff, double te);

// Pilot length maximising the closed-form throughput at fixed eeff. Solves
// the stationarity equation on [2, T-1], then rounds to the better integer
// neighbour with b recomputed from eeff at each candidate.
std::int64_t optimal_te(const Channel& ch, std::int64_t T, double eeff);

// Block error maximising the closed-form throughput at fixed Te.
OptimalEeff optimal_eeff(const Channel& ch, std::int64_t Te);

// Alternates optimal_te and optimal_eeff from eeff = 1/2 until both stop
// moving (or 100 rounds, returning the best iterate flagged non-converged).
JointOptimum joint_optimum(const Channel& ch, std::int64_t T, const Tolerance& tol = {});

// Assembles the full report for one configuration.
EttReport ett_report(const Channel& ch, const EttConfig& cfg);

}  // namespace erasure
