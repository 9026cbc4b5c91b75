#include "erasure/mc.hpp"

#include <algorithm>
#include <cmath>
#include <thread>
#include <vector>

namespace erasure {

namespace {

// Index-ordered reduction of per-trial samples; worker count never touches it.
struct Moments {
    double mean;
    double stderr_;
};

Moments reduce(const std::vector<double>& xs) {
    const auto n = static_cast<double>(xs.size());
    detail::KahanSum sum;
    for (const double x : xs) sum.add(x);
    const double mean = sum.value() / n;
    if (xs.size() < 2) return {mean, 0.0};
    detail::KahanSum ssd;
    for (const double x : xs) ssd.add((x - mean) * (x - mean));
    return {mean, std::sqrt(ssd.value() / (n * (n - 1.0)))};
}

void run_trials(std::int64_t trials, int workers, const std::function<void(std::int64_t)>& body) {
    if (workers <= 1) {
        for (std::int64_t t = 0; t < trials; ++t) body(t);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    const std::int64_t chunk = (trials + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
        const std::int64_t lo = w * chunk;
        const std::int64_t hi = std::min(trials, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::int64_t t = lo; t < hi; ++t) body(t);
        });
    }
    for (auto& th : pool) th.join();
}

double clamp_prob(double p) { return std::clamp(p, 0.0, 1.0); }

}  // namespace

void SimConfig::validate() const {
    if (trials < 1) throw std::domain_error("SimConfig: need trials >= 1");
}

std::uint64_t derive_trial_seed(std::uint64_t master, std::int64_t index) {
    std::uint64_t z = master + (static_cast<std::uint64_t>(index) + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

SimReport simulate_ett(const Channel& ch, const EttConfig& cfg, const SimConfig& sim,
                       int workers) {
    ch.validate();
    cfg.validate();
    sim.validate();

    // Everything downstream of the pilot count is a function of k; tabulate
    // once so trials only draw bits.
    const std::int64_t Te = cfg.Te;
    const double Tt = static_cast<double>(cfg.Tt());
    std::vector<double> rate(static_cast<std::size_t>(Te) + 1);
    for (std::int64_t k = 0; k <= Te; ++k) {
        rate[static_cast<std::size_t>(k)] = rate_decision(Te, k, cfg.b);
    }
    const std::int64_t k_min_ok = step_success_k_min(ch, Te, cfg.b);
    std::vector<double> eps;
    const bool step = sim.error_model == ErrorModel::step;
    if (!step) {
        const auto block_pmf = binom_log_pmf_table(cfg.Tt(), ch.delta);
        eps.resize(static_cast<std::size_t>(Te) + 1);
        for (std::int64_t k = 0; k <= Te; ++k) {
            const double r = rate[static_cast<std::size_t>(k)];
            double e;
            switch (sim.error_model) {
                case ErrorModel::ppv_upper: e = detail::eps_upper_pmf(block_pmf, r); break;
                case ErrorModel::ppv_lower: e = detail::eps_lower_pmf(block_pmf, r); break;
                default:
                    e = 0.5 * (detail::eps_upper_pmf(block_pmf, r) +
                               detail::eps_lower_pmf(block_pmf, r));
                    break;
            }
            eps[static_cast<std::size_t>(k)] = clamp_prob(e);
        }
    }

    std::vector<double> payoff(static_cast<std::size_t>(sim.trials));
    std::vector<double> err_frac(static_cast<std::size_t>(sim.trials));
    run_trials(sim.trials, workers, [&](std::int64_t t) {
        SplitMix64 rng(derive_trial_seed(sim.master_seed, t));
        std::int64_t k = 0;
        for (std::int64_t i = 0; i < Te; ++i) {
            if (rng.uniform01() < ch.delta) ++k;
        }
        bool error;
        if (step) {
            error = k < k_min_ok;
        } else {
            error = rng.uniform01() < eps[static_cast<std::size_t>(k)];
        }
        payoff[static_cast<std::size_t>(t)] =
            error ? 0.0 : Tt * rate[static_cast<std::size_t>(k)];
        err_frac[static_cast<std::size_t>(t)] = error ? 1.0 : 0.0;
    });

    const Moments n = reduce(payoff);
    const Moments e = reduce(err_frac);
    return SimReport{n.mean, n.stderr_, e.mean, e.stderr_, sim.trials};
}

SimReport simulate_window(const Channel& ch, const Schedule& s, double eeff,
                          const SimConfig& sim, int workers) {
    ch.validate();
    s.validate();
    sim.validate();
    const auto backoffs = window_backoffs(ch, s, eeff);
    const auto M = s.blocks.size();
    const bool step = sim.error_model == ErrorModel::step;

    // Per-block tables over the cumulative erasure count.
    std::vector<std::int64_t> S_prev(M, 0);
    std::vector<std::int64_t> k_min_ok(M, 0);
    std::vector<std::vector<double>> eps(M);
    {
        std::int64_t S = 0;
        for (std::size_t i = 0; i < M; ++i) {
            S_prev[i] = S;
            S += s.blocks[i];
        }
    }
    for (std::size_t i = 1; i < M; ++i) {
        if (step) {
            k_min_ok[i] = step_success_k_min(ch, S_prev[i], backoffs[i]);
        } else {
            const auto block_pmf = binom_log_pmf_table(s.blocks[i], ch.delta);
            auto& table = eps[i];
            table.resize(static_cast<std::size_t>(S_prev[i]) + 1);
            for (std::int64_t k = 0; k <= S_prev[i]; ++k) {
                const double r = rate_decision(S_prev[i], k, backoffs[i]);
                double e;
                switch (sim.error_model) {
                    case ErrorModel::ppv_upper: e = detail::eps_upper_pmf(block_pmf, r); break;
                    case ErrorModel::ppv_lower: e = detail::eps_lower_pmf(block_pmf, r); break;
                    default:
                        e = 0.5 * (detail::eps_upper_pmf(block_pmf, r) +
                                   detail::eps_lower_pmf(block_pmf, r));
                        break;
                }
                table[static_cast<std::size_t>(k)] = clamp_prob(e);
            }
        }
    }

    const double transmitted = static_cast<double>(M - 1);
    std::vector<double> payoff(static_cast<std::size_t>(sim.trials));
    std::vector<double> err_frac(static_cast<std::size_t>(sim.trials));
    run_trials(sim.trials, workers, [&](std::int64_t t) {
        SplitMix64 rng(derive_trial_seed(sim.master_seed, t));
        std::int64_t cum = 0;
        // block 1: estimation only
        for (std::int64_t i = 0; i < s.blocks[0]; ++i) {
            if (rng.uniform01() < ch.delta) ++cum;
        }
        double bits = 0.0;
        double errors = 0.0;
        for (std::size_t i = 1; i < M; ++i) {
            const std::int64_t k = cum;
            const double r = rate_decision(S_prev[i], k, backoffs[i]);
            bool error;
            if (step) {
                error = k < k_min_ok[i];
            } else {
                error = rng.uniform01() < eps[i][static_cast<std::size_t>(k)];
            }
            if (!error) bits += static_cast<double>(s.blocks[i]) * r;
            errors += error ? 1.0 : 0.0;
            for (std::int64_t j = 0; j < s.blocks[i]; ++j) {
                if (rng.uniform01() < ch.delta) ++cum;
            }
        }
        payoff[static_cast<std::size_t>(t)] = bits;
        err_frac[static_cast<std::size_t>(t)] = errors / transmitted;
    });

    const Moments n = reduce(payoff);
    const Moments e = reduce(err_frac);
    return SimReport{n.mean, n.stderr_, e.mean, e.stderr_, sim.trials};
}

}  // namespace erasure
