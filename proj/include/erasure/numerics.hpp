#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "erasure/errors.hpp"

namespace erasure {

// Stopping rule shared by the 1-D solvers.
struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    int max_iter = 200;

    void validate() const;
};

// Gaussian tail probability Q(x) = 1 - Phi(x). Strictly decreasing, Q(0) = 1/2.
double q_func(double x);

// Standard normal density.
double normal_pdf(double x);

// Inverse of q_func on (0, 1): q_func(q_inv(p)) == p.
double q_inv(double p);

// log of the Binomial(n, p) pmf at k, via log-gamma; usable up to n ~ 1e7.
double log_binom_pmf(std::int64_t n, std::int64_t k, double p);

// P(K <= k) for K ~ Binomial(n, p). k < 0 gives 0, k >= n gives 1.
// Exact term-by-term summation in the probability domain (compensated).
double binom_cdf(std::int64_t n, std::int64_t k, double p);

// Precomputed log-pmf row for one (n, p), reused by the batch evaluators.
std::vector<double> binom_log_pmf_table(std::int64_t n, double p);

// Bisection on a bracketed sign change. Result is invariant to swapping
// (lo, hi). Throws bracketing_error without a sign change, convergence_error
// (carrying the best iterate) if max_iter is exhausted.
double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const Tolerance& tol = {});

// OLS slope of log y against log x. Needs >= 2 points, all coordinates > 0.
double fit_loglog_slope(std::span<const std::pair<double, double>> points);

// Snaps x to the nearest integer when it is within a relative 1e-9 of it.
// Keeps floor/ceil of analytically-integer products (like n * 0.3) stable.
double snap_near_integer(double x);

namespace detail {

// Compensated (Kahan) accumulator; keeps long pmf sums deterministic and tight.
struct KahanSum {
    double sum = 0.0;
    double carry = 0.0;

    void add(double x) {
        double y = x - carry;
        double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    double value() const { return sum; }
};

}  // namespace detail

}  // namespace erasure
