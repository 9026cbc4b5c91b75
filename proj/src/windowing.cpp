#include "erasure/windowing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace erasure {

namespace {

constexpr double kSqrt2Pi = 2.50662827463100050242;

double common_factor(double eeff) {
    const double x = q_inv(eeff);
    return x * (1.0 - eeff) + std::exp(-0.5 * x * x) / kSqrt2Pi;
}

// Per-bit step-exact throughput of one block given its estimation window.
double block_fraction_exact(const Channel& ch, std::int64_t S_prev, double b) {
    const std::int64_t k_lo = step_success_k_min(ch, S_prev, b);
    const double hi = snap_near_integer(static_cast<double>(S_prev) * (1.0 - b));
    const auto k_hi =
        std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(hi)), S_prev);
    if (k_lo > k_hi) return 0.0;
    detail::KahanSum acc;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double rate = rate_decision(S_prev, k, b);
        if (rate <= 0.0) continue;
        acc.add(rate * std::exp(log_binom_pmf(S_prev, k, ch.delta)));
    }
    return acc.value();
}

void check_eeff(double eeff) {
    if (!(eeff > 0.0) || eeff > 0.5) {
        throw std::domain_error("windowing: need 0 < eeff <= 1/2");
    }
}

}  // namespace

std::int64_t Schedule::total() const {
    return std::accumulate(blocks.begin(), blocks.end(), std::int64_t{0});
}

void Schedule::validate() const {
    if (M() < 2) throw std::domain_error("Schedule: need at least 2 blocks");
    for (const auto b : blocks) {
        if (b < 1) throw std::domain_error("Schedule: every block must be >= 1 bit");
    }
}

Schedule make_geometric(std::int64_t M) {
    if (M < 2 || M > 40) throw std::domain_error("make_geometric: need 2 <= M <= 40");
    Schedule s;
    s.kind = ScheduleKind::geometric;
    s.blocks.resize(static_cast<std::size_t>(M));
    for (std::int64_t i = 0; i < M; ++i) {
        s.blocks[static_cast<std::size_t>(i)] = std::int64_t{1} << i;
    }
    return s;
}

Schedule make_arithmetic(std::int64_t T, std::int64_t M) {
    if (M < 2) throw std::domain_error("make_arithmetic: need M >= 2");
    if (T < M * (M + 1) / 2) {
        throw std::domain_error("make_arithmetic: need T >= M(M+1)/2");
    }
    const double d = 2.0 * static_cast<double>(T - M) /
                     (static_cast<double>(M) * static_cast<double>(M - 1));
    Schedule s;
    s.kind = ScheduleKind::arithmetic;
    s.blocks.resize(static_cast<std::size_t>(M));
    std::int64_t used = 0;
    for (std::int64_t i = 0; i < M; ++i) {
        s.blocks[static_cast<std::size_t>(i)] = std::llround(1.0 + static_cast<double>(i) * d);
        used += s.blocks[static_cast<std::size_t>(i)];
    }
    s.blocks.back() += T - used;  // rounding residual
    s.validate();
    return s;
}

Schedule make_custom(std::vector<std::int64_t> blocks) {
    Schedule s;
    s.kind = ScheduleKind::custom;
    s.blocks = std::move(blocks);
    s.validate();
    return s;
}

std::vector<double> window_backoffs(const Channel& ch, const Schedule& s, double eeff) {
    ch.validate();
    s.validate();
    check_eeff(eeff);
    const double x = q_inv(eeff);
    const double v = ch.delta * (1.0 - ch.delta);
    std::vector<double> b(s.blocks.size());
    b[0] = std::numeric_limits<double>::infinity();
    std::int64_t S = s.blocks[0];
    for (std::size_t i = 1; i < s.blocks.size(); ++i) {
        b[i] = std::sqrt(v / static_cast<double>(S)) * x;
        S += s.blocks[i];
    }
    return b;
}

WindowReport window_throughput_exact(const Channel& ch, const Schedule& s, double eeff) {
    const auto backoffs = window_backoffs(ch, s, eeff);
    WindowReport rep;
    rep.per_block.reserve(s.blocks.size());
    rep.per_block.push_back(BlockResult{0, backoffs[0], 0.0});
    detail::KahanSum total;
    std::int64_t S = s.blocks[0];
    for (std::size_t i = 1; i < s.blocks.size(); ++i) {
        const double contribution = static_cast<double>(s.blocks[i]) *
                                    block_fraction_exact(ch, S, backoffs[i]);
        rep.per_block.push_back(BlockResult{S, backoffs[i], contribution});
        total.add(contribution);
        S += s.blocks[i];
    }
    rep.N_total = total.value();
    rep.queries = s.M() - 1;
    return rep;
}

WindowReport window_throughput_gauss(const Channel& ch, const Schedule& s, double eeff) {
    const auto backoffs = window_backoffs(ch, s, eeff);
    const double g = common_factor(eeff);
    const double v = ch.delta * (1.0 - ch.delta);
    const double lead = (1.0 - ch.delta) * (1.0 - eeff);
    WindowReport rep;
    rep.per_block.reserve(s.blocks.size());
    rep.per_block.push_back(BlockResult{0, backoffs[0], 0.0});
    detail::KahanSum total;
    std::int64_t S = s.blocks[0];
    for (std::size_t i = 1; i < s.blocks.size(); ++i) {
        const double correction = std::sqrt(v / static_cast<double>(S)) * g;
        const double contribution =
            std::max(0.0, static_cast<double>(s.blocks[i]) * (lead - correction));
        rep.per_block.push_back(BlockResult{S, backoffs[i], contribution});
        total.add(contribution);
        S += s.blocks[i];
    }
    rep.N_total = total.value();
    rep.queries = s.M() - 1;
    return rep;
}

WindowReport window_throughput_ppv(const Channel& ch, const Schedule& s, double eeff,
                                   ErrorModel model) {
    const auto backoffs = window_backoffs(ch, s, eeff);
    WindowReport rep;
    rep.per_block.reserve(s.blocks.size());
    rep.per_block.push_back(BlockResult{0, backoffs[0], 0.0});
    detail::KahanSum total;
    std::int64_t S = s.blocks[0];
    for (std::size_t i = 1; i < s.blocks.size(); ++i) {
        const std::int64_t Ti = s.blocks[i];
        double contribution = 0.0;
        if (model == ErrorModel::step) {
            contribution = static_cast<double>(Ti) * block_fraction_exact(ch, S, backoffs[i]);
        } else {
            const auto pilot_pmf = binom_log_pmf_table(S, ch.delta);
            const auto block_pmf = binom_log_pmf_table(Ti, ch.delta);
            detail::KahanSum acc;
            for (std::int64_t k = 0; k <= S; ++k) {
                const double r = rate_decision(S, k, backoffs[i]);
                if (r <= 0.0) continue;
                double eps;
                switch (model) {
                    case ErrorModel::ppv_upper: eps = detail::eps_upper_pmf(block_pmf, r); break;
                    case ErrorModel::ppv_lower: eps = detail::eps_lower_pmf(block_pmf, r); break;
                    default:
                        eps = 0.5 * (detail::eps_upper_pmf(block_pmf, r) +
                                     detail::eps_lower_pmf(block_pmf, r));
                        break;
                }
                acc.add((1.0 - eps) * r * std::exp(pilot_pmf[static_cast<std::size_t>(k)]));
            }
            contribution = static_cast<double>(Ti) * acc.value();
        }
        rep.per_block.push_back(BlockResult{S, backoffs[i], contribution});
        total.add(contribution);
        S += s.blocks[i];
    }
    rep.N_total = total.value();
    rep.queries = s.M() - 1;
    return rep;
}

double window_eeff_step_exact(const Channel& ch, const Schedule& s, double eeff) {
    const auto backoffs = window_backoffs(ch, s, eeff);
    detail::KahanSum acc;
    std::int64_t S = s.blocks[0];
    for (std::size_t i = 1; i < s.blocks.size(); ++i) {
        acc.add(eeff_step_exact(ch, S, backoffs[i]));
        S += s.blocks[i];
    }
    return acc.value() / static_cast<double>(s.M() - 1);
}

BoundPair geometric_bounds(const Channel& ch, std::int64_t M, double eeff) {
    ch.validate();
    if (M < 2) throw std::domain_error("geometric_bounds: need M >= 2");
    check_eeff(eeff);
    const double T = std::ldexp(1.0, static_cast<int>(M)) - 1.0;
    const double g = common_factor(eeff);
    const double lead = T * (1.0 - ch.delta) * (1.0 - eeff);
    const double v = ch.delta * (1.0 - ch.delta);
    const double sqrt2m1 = std::sqrt(2.0) - 1.0;
    const double upper = lead - std::sqrt((T + 1.0) * v) / sqrt2m1 * g;
    const double lower = lead - std::sqrt(2.0 * (T + 1.0) * v) / sqrt2m1 * g;
    return BoundPair{lower, upper};
}

}  // namespace erasure
