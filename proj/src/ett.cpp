#include "erasure/ett.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace erasure {

namespace {

constexpr double kTwoPi = 6.28318530717958647693;

// Per-bit step-exact expected throughput of a transmission block whose rate
// comes from Te pilot bits with backoff b (F_s in the report fields).
double step_success_fraction(const Channel& ch, std::int64_t Te, double b) {
    const std::int64_t k_lo = step_success_k_min(ch, Te, b);
    const double hi = snap_near_integer(static_cast<double>(Te) * (1.0 - b));
    const auto k_hi = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(hi)), Te);
    if (k_lo > k_hi) return 0.0;
    detail::KahanSum acc;
    for (std::int64_t k = k_lo; k <= k_hi; ++k) {
        const double rate = rate_decision(Te, k, b);
        if (rate <= 0.0) continue;
        acc.add(rate * std::exp(log_binom_pmf(Te, k, ch.delta)));
    }
    return acc.value();
}

}  // namespace

void EttConfig::validate() const {
    if (Te < 1 || Te >= T) {
        throw std::domain_error("EttConfig: need 1 <= Te < T");
    }
    if (!(b >= 0.0)) {
        throw std::domain_error("EttConfig: need b >= 0");
    }
}

double rate_decision(std::int64_t Te, std::int64_t k, double b) {
    if (Te < 1 || k < 0 || k > Te) {
        throw std::domain_error("rate_decision: need 0 <= k <= Te");
    }
    return std::max(0.0, 1.0 - static_cast<double>(k) / static_cast<double>(Te) - b);
}

std::int64_t step_success_k_min(const Channel& ch, std::int64_t Te, double b) {
    ch.validate();
    if (Te < 1) throw std::domain_error("step_success_k_min: need Te >= 1");
    // The block decodes iff its rate does not exceed capacity, i.e. iff
    // k >= Te (delta - b); the boundary count itself decodes.
    const double x = snap_near_integer(static_cast<double>(Te) * (ch.delta - b));
    if (x <= 0.0) return 0;
    return static_cast<std::int64_t>(std::ceil(x));
}

double eeff_ppv(const Channel& ch, const EttConfig& cfg, ErrorModel model) {
    ch.validate();
    cfg.validate();
    if (model != ErrorModel::ppv_upper && model != ErrorModel::ppv_lower) {
        throw std::domain_error("eeff_ppv: model must be ppv_upper or ppv_lower");
    }
    const auto pilot_pmf = binom_log_pmf_table(cfg.Te, ch.delta);
    const auto block_pmf = binom_log_pmf_table(cfg.Tt(), ch.delta);
    detail::KahanSum acc;
    for (std::int64_t k = 0; k <= cfg.Te; ++k) {
        const double r = rate_decision(cfg.Te, k, cfg.b);
        const double eps = model == ErrorModel::ppv_upper
                               ? detail::eps_upper_pmf(block_pmf, r)
                               : detail::eps_lower_pmf(block_pmf, r);
        acc.add(eps * std::exp(pilot_pmf[static_cast<std::size_t>(k)]));
    }
    return std::clamp(acc.value(), 0.0, 1.0);
}

double eeff_step_exact(const Channel& ch, std::int64_t Te, double b) {
    ch.validate();
    if (Te < 1) throw std::domain_error("eeff_step_exact: need Te >= 1");
    if (!(b >= 0.0)) throw std::domain_error("eeff_step_exact: need b >= 0");
    const std::int64_t k_lo = step_success_k_min(ch, Te, b);
    return binom_cdf(Te, k_lo - 1, ch.delta);
}

double eeff_step_gauss(const Channel& ch, std::int64_t Te, double b) {
    ch.validate();
    if (Te < 1) throw std::domain_error("eeff_step_gauss: need Te >= 1");
    if (!(b >= 0.0)) throw std::domain_error("eeff_step_gauss: need b >= 0");
    return q_func(b * std::sqrt(static_cast<double>(Te) / (ch.delta * (1.0 - ch.delta))));
}

double backoff_for_eeff(const Channel& ch, std::int64_t Te, double eeff) {
    ch.validate();
    if (Te < 1) throw std::domain_error("backoff_for_eeff: need Te >= 1");
    if (!(eeff > 0.0) || eeff > 0.5) {
        throw std::domain_error("backoff_for_eeff: need 0 < eeff <= 1/2 (b >= 0)");
    }
    return std::sqrt(ch.delta * (1.0 - ch.delta) / static_cast<double>(Te)) * q_inv(eeff);
}

double throughput_step_exact(const Channel& ch, const EttConfig& cfg) {
    ch.validate();
    cfg.validate();
    return static_cast<double>(cfg.Tt()) * step_success_fraction(ch, cfg.Te, cfg.b);
}

double throughput_ppv(const Channel& ch, const EttConfig& cfg, ErrorModel model) {
    ch.validate();
    cfg.validate();
    if (model == ErrorModel::step) return throughput_step_exact(ch, cfg);
    const auto pilot_pmf = binom_log_pmf_table(cfg.Te, ch.delta);
    const auto block_pmf = binom_log_pmf_table(cfg.Tt(), ch.delta);
    detail::KahanSum acc;
    for (std::int64_t k = 0; k <= cfg.Te; ++k) {
        const double r = rate_decision(cfg.Te, k, cfg.b);
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
    return static_cast<double>(cfg.Tt()) * acc.value();
}

double throughput_gauss(const Channel& ch, const EttConfig& cfg) {
    ch.validate();
    cfg.validate();
    const double v = ch.delta * (1.0 - ch.delta);
    const double te = static_cast<double>(cfg.Te);
    // x = Qinv(eeff(b)) computed directly from b, which stays finite even
    // where eeff underflows.
    const double x = cfg.b * std::sqrt(te / v);
    const double eeff = q_func(x);
    const double correction = std::sqrt(v / (kTwoPi * te)) * std::exp(-0.5 * x * x);
    return static_cast<double>(cfg.Tt()) *
           ((1.0 - ch.delta - cfg.b) * (1.0 - eeff) - correction);
}

double optimal_te_residual(const Channel& ch, std::int64_t T, double eeff, double te) {
    ch.validate();
    if (!(eeff > 0.0) || eeff > 0.5) {
        throw std::domain_error("optimal_te_residual: need 0 < eeff <= 1/2");
    }
    if (!(te > 0.0)) throw std::domain_error("optimal_te_residual: need te > 0");
    // d/dTe of the closed-form throughput at fixed eeff (the backoff shrinks
    // as sqrt(v/Te) x with Te). The left side falls in Te, the right side is
    // constant, so there is at most one crossing. At eeff = 1/2 (x = 0) this
    // reduces to the b-held-constant stationarity condition.
    const double v = ch.delta * (1.0 - ch.delta);
    const double x = q_inv(eeff);
    const double g = x * (1.0 - eeff) + std::exp(-0.5 * x * x) / std::sqrt(kTwoPi);
    const double lhs =
        0.5 * (static_cast<double>(T) + te) * std::sqrt(v / (te * te * te)) * g;
    const double rhs = (1.0 - ch.delta) * (1.0 - eeff);
    return lhs - rhs;
}

std::int64_t optimal_te(const Channel& ch, std::int64_t T, double eeff) {
    ch.validate();
    if (T < 4) throw std::domain_error("optimal_te: need T >= 4");
    if (!(eeff > 0.0) || eeff > 0.5) {
        throw std::domain_error("optimal_te: need 0 < eeff <= 1/2");
    }
    const double lo = 2.0;
    const double hi = static_cast<double>(T - 1);
    auto residual = [&](double te) { return optimal_te_residual(ch, T, eeff, te); };
    const double r_lo = residual(lo);
    const double r_hi = residual(hi);
    if (r_hi > 0.0) {
        // Still climbing at Te = T-1: the target block error is too small for
        // this horizon (the backoff would eat the whole transmission phase).
        throw no_solution_error(
            "optimal_te: no admissible optimum on [2, T-1]; eeff too small for this T");
    }
    if (r_lo <= 0.0) return 2;  // already descending: the edge is the argmax
    Tolerance tol;
    tol.abs_tol = 1e-9;
    const double te_cont = bisect_root(residual, lo, hi, tol);

    // Round to the better integer neighbour under the closed-form throughput,
    // recomputing b from eeff at each candidate.
    const auto lo_cand = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::floor(te_cont)), 2, T - 1);
    const auto hi_cand = std::clamp<std::int64_t>(
        static_cast<std::int64_t>(std::ceil(te_cont)), 2, T - 1);
    auto value_at = [&](std::int64_t te) {
        const EttConfig cfg{T, te, backoff_for_eeff(ch, te, eeff)};
        return throughput_gauss(ch, cfg);
    };
    if (lo_cand == hi_cand) return lo_cand;
    return value_at(hi_cand) > value_at(lo_cand) ? hi_cand : lo_cand;
}

OptimalEeff optimal_eeff(const Channel& ch, std::int64_t Te) {
    ch.validate();
    if (Te < 2) throw std::domain_error("optimal_eeff: need Te >= 2");
    const double v = ch.delta * (1.0 - ch.delta);
    const double scale = (1.0 - ch.delta) * std::sqrt(static_cast<double>(Te) / (kTwoPi * v));
    // Stationarity in x = Qinv(eeff): scale * exp(-x^2/2) = Phi(x). The left
    // side falls, the right side rises, so there is at most one crossing on
    // x >= 0; none means the maximum sits on the b = 0 boundary.
    auto residual = [&](double x) {
        return scale * std::exp(-0.5 * x * x) - (1.0 - q_func(x));
    };
    if (residual(0.0) <= 0.0) {
        return OptimalEeff{0.5, false};
    }
    const double x = bisect_root(residual, 0.0, 40.0);
    return OptimalEeff{q_func(x), true};
}

JointOptimum joint_optimum(const Channel& ch, std::int64_t T, const Tolerance& tol) {
    ch.validate();
    tol.validate();
    if (T < 16) throw std::domain_error("joint_optimum: need T >= 16");
    double eeff = 0.5;
    std::int64_t te = optimal_te(ch, T, eeff);
    auto value_at = [&](std::int64_t t, double e) {
        const EttConfig cfg{T, t, backoff_for_eeff(ch, t, e)};
        return throughput_gauss(ch, cfg);
    };
    JointOptimum best{te, eeff, false, 0};
    double best_value = value_at(te, eeff);
    for (int round = 1; round <= 100; ++round) {
        const double new_eeff = optimal_eeff(ch, te).eeff;
        const std::int64_t new_te = optimal_te(ch, T, new_eeff);
        const double value = value_at(new_te, new_eeff);
        if (value > best_value) {
            best_value = value;
            best = JointOptimum{new_te, new_eeff, false, round};
        }
        const bool settled =
            new_te == te && std::fabs(new_eeff - eeff) < tol.rel_tol * std::fabs(eeff);
        te = new_te;
        eeff = new_eeff;
        if (settled) {
            return JointOptimum{te, eeff, true, round};
        }
    }
    return best;  // oscillated; best iterate, flagged non-converged
}

EttReport ett_report(const Channel& ch, const EttConfig& cfg) {
    EttReport rep{};
    rep.eeff_exact = eeff_step_exact(ch, cfg.Te, cfg.b);
    rep.eeff_gauss = eeff_step_gauss(ch, cfg.Te, cfg.b);
    rep.N_exact = throughput_step_exact(ch, cfg);
    rep.N_gauss = throughput_gauss(ch, cfg);
    rep.N_ppv_lower = throughput_ppv(ch, cfg, ErrorModel::ppv_upper);
    rep.N_ppv_upper = throughput_ppv(ch, cfg, ErrorModel::ppv_lower);
    // eeff_gauss underflows to 0 for very large backoffs; keep the oracle defined.
    const double oracle_eeff = std::max(rep.eeff_gauss, std::numeric_limits<double>::min());
    rep.regret_step = regret(rep.N_exact, oracle_throughput(ch, cfg.T, oracle_eeff));
    return rep;
}

}  // namespace erasure
