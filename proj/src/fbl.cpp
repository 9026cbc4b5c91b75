#include "erasure/fbl.hpp"

#include <algorithm>
#include <cmath>

namespace erasure {

namespace {
constexpr double kLn2 = 0.69314718055994530942;
}

void Channel::validate() const {
    if (!(delta > 0.0) || !(delta < 1.0)) {
        throw std::domain_error("Channel: need 0 < delta < 1");
    }
}

void CodePoint::validate() const {
    if (n < 1) throw std::domain_error("CodePoint: need n >= 1");
    if (!(r >= 0.0 && r <= 1.0)) {
        throw std::domain_error("CodePoint: need 0 <= r <= 1");
    }
}

namespace detail {

double eps_upper_pmf(std::span<const double> log_pmf, double r) {
    const auto n = static_cast<std::int64_t>(log_pmf.size()) - 1;
    const double n_one_minus_r = static_cast<double>(n) * (1.0 - r);
    erasure::detail::KahanSum acc;
    for (std::int64_t t = 0; t <= n; ++t) {
        const double e = std::max(n_one_minus_r - static_cast<double>(t), 0.0);
        acc.add(std::exp(log_pmf[static_cast<std::size_t>(t)] - e * kLn2));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double eps_lower_pmf(std::span<const double> log_pmf, double r) {
    const auto n = static_cast<std::int64_t>(log_pmf.size()) - 1;
    const double n_one_minus_r = static_cast<double>(n) * (1.0 - r);
    const auto t_start = static_cast<std::int64_t>(std::floor(n_one_minus_r)) + 1;
    erasure::detail::KahanSum acc;
    for (std::int64_t t = std::max<std::int64_t>(t_start, 0); t <= n; ++t) {
        // factor = 1 - 2^(n(1-r) - t), with the exponent < 0 throughout;
        // expm1 keeps the factor accurate when t is just above n(1-r).
        const double factor = -std::expm1((n_one_minus_r - static_cast<double>(t)) * kLn2);
        acc.add(std::exp(log_pmf[static_cast<std::size_t>(t)]) * factor);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

}  // namespace detail

double eps_upper(const Channel& ch, const CodePoint& cp) {
    ch.validate();
    cp.validate();
    const double n_one_minus_r = static_cast<double>(cp.n) * (1.0 - cp.r);
    erasure::detail::KahanSum acc;
    for (std::int64_t t = 0; t <= cp.n; ++t) {
        const double e = std::max(n_one_minus_r - static_cast<double>(t), 0.0);
        acc.add(std::exp(log_binom_pmf(cp.n, t, ch.delta) - e * kLn2));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double eps_lower(const Channel& ch, const CodePoint& cp) {
    ch.validate();
    cp.validate();
    const double n_one_minus_r = static_cast<double>(cp.n) * (1.0 - cp.r);
    const auto t_start = static_cast<std::int64_t>(std::floor(n_one_minus_r)) + 1;
    erasure::detail::KahanSum acc;
    for (std::int64_t t = std::max<std::int64_t>(t_start, 0); t <= cp.n; ++t) {
        const double factor = -std::expm1((n_one_minus_r - static_cast<double>(t)) * kLn2);
        acc.add(std::exp(log_binom_pmf(cp.n, t, ch.delta)) * factor);
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

BoundPair eps_bounds(const Channel& ch, const CodePoint& cp) {
    const BoundPair out{eps_lower(ch, cp), eps_upper(ch, cp)};
    if (out.lower > out.upper + 1e-12) {
        throw consistency_error("eps_bounds: lower bound exceeds upper bound");
    }
    return out;
}

double oracle_rate(const Channel& ch, std::int64_t n, double eeff) {
    ch.validate();
    if (n < 1) throw std::domain_error("oracle_rate: need n >= 1");
    if (!(eeff > 0.0) || !(eeff < 1.0)) {
        throw std::domain_error("oracle_rate: need 0 < eeff < 1");
    }
    const double dispersion = std::sqrt(ch.delta * (1.0 - ch.delta) / static_cast<double>(n));
    const double rate = (1.0 - ch.delta) - dispersion * q_inv(eeff);
    return std::clamp(rate, 0.0, 1.0);
}

double oracle_throughput(const Channel& ch, std::int64_t T, double eeff) {
    return static_cast<double>(T) * oracle_rate(ch, T, eeff) * (1.0 - eeff);
}

double regret(double n_strategy, double n_oracle) {
    if (!std::isfinite(n_strategy) || !std::isfinite(n_oracle)) {
        throw std::domain_error("regret: inputs must be finite");
    }
    return n_oracle - n_strategy;
}

}  // namespace erasure
