#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <utility>
#include <vector>

#include "erasure/ett.hpp"

using namespace erasure;

namespace {

const Channel kHalf{0.5};

// Integer sweep of the closed-form throughput over Te; the brute-force
// oracle for the stationarity solver.
std::int64_t sweep_argmax_te(const Channel& ch, std::int64_t T, double eeff,
                             std::int64_t te_lo, std::int64_t te_hi) {
    std::int64_t best_te = te_lo;
    double best = -1e300;
    for (std::int64_t te = te_lo; te <= te_hi; ++te) {
        const EttConfig cfg{T, te, backoff_for_eeff(ch, te, eeff)};
        const double v = throughput_gauss(ch, cfg);
        if (v > best) {
            best = v;
            best_te = te;
        }
    }
    return best_te;
}

}  // namespace

TEST_CASE("rate_decision") {
    CHECK(rate_decision(10, 10, 0.0) == 0.0);
    CHECK(rate_decision(10, 0, 0.0) == 1.0);
    CHECK(rate_decision(4, 1, 0.1) == doctest::Approx(0.65).epsilon(1e-15));
    CHECK_THROWS_AS(rate_decision(4, 5, 0.0), std::domain_error);
}

TEST_CASE("eeff_ppv hand-enumerated at Te = Tt = 2") {
    // delta = 1/2, b = 0. Pilot counts k = 0,1,2 carry weights 1/4, 1/2, 1/4
    // and rates 1, 1/2, 0. Walking the 3-term inner sums by hand gives
    // eps_upper(2, r) = 1, 7/8, 9/16 and eps_lower(2, r) = 7/16, 1/8, 0.
    const EttConfig cfg{4, 2, 0.0};
    CHECK(eeff_ppv(kHalf, cfg, ErrorModel::ppv_upper) ==
          doctest::Approx(53.0 / 64.0).epsilon(1e-12));
    CHECK(eeff_ppv(kHalf, cfg, ErrorModel::ppv_lower) ==
          doctest::Approx(11.0 / 64.0).epsilon(1e-12));
    CHECK_THROWS_AS(eeff_ppv(kHalf, cfg, ErrorModel::step), std::domain_error);
}

TEST_CASE("eeff_ppv ordering and clamped-rate case") {
    // b >= 1 forces rate 0 everywhere; the converse bound is then 0.
    CHECK(eeff_ppv({0.3}, {10, 4, 1.0}, ErrorModel::ppv_lower) == 0.0);

    const EttConfig cfg{250, 50, 0.05};
    const Channel ch{0.3};
    const double lo = eeff_ppv(ch, cfg, ErrorModel::ppv_lower);
    const double hi = eeff_ppv(ch, cfg, ErrorModel::ppv_upper);
    CHECK(lo <= hi);
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0);
}

TEST_CASE("eeff_step_exact pinned values") {
    // 5/16: of the 16 equiprobable pilot patterns of Bin(4, 1/2), those with
    // fewer than 2 erasures (1 + 4 patterns) overshoot capacity.
    CHECK(eeff_step_exact(kHalf, 4, 0.0) == doctest::Approx(5.0 / 16.0).epsilon(1e-12));
    CHECK(eeff_step_exact(kHalf, 4, 0.5) == 0.0);   // b >= delta: empty event
    CHECK(eeff_step_exact(kHalf, 4, 0.6) == 0.0);
}

TEST_CASE("eeff_step_gauss pinned values") {
    CHECK(eeff_step_gauss(kHalf, 123, 0.0) == doctest::Approx(0.5).epsilon(1e-15));
    // b sqrt(Te / (delta(1-delta))) = 0.05 * 40 = 2.
    CHECK(eeff_step_gauss(kHalf, 400, 0.05) == doctest::Approx(0.0227501319).epsilon(1e-8));
    CHECK(eeff_step_gauss(kHalf, 10000, 0.05) < 1e-20);
}

TEST_CASE("backoff_for_eeff inverts eeff_step_gauss") {
    CHECK(backoff_for_eeff(kHalf, 100, 0.5) == 0.0);
    CHECK(backoff_for_eeff(kHalf, 400, 0.02275) == doctest::Approx(0.05).epsilon(1e-4));
    for (double e : {0.05, 0.2, 0.5}) {
        const double b = backoff_for_eeff(kHalf, 400, e);
        CHECK(eeff_step_gauss(kHalf, 400, b) == doctest::Approx(e).epsilon(1e-9));
    }
    CHECK_THROWS_AS(backoff_for_eeff(kHalf, 400, 0.6), std::domain_error);
    CHECK_THROWS_AS(backoff_for_eeff(kHalf, 400, 0.0), std::domain_error);
}

TEST_CASE("throughput_step_exact hand enumeration") {
    // k = 2,3,4 decode with rates 1/2, 1/4, 0; weights 6/16, 4/16, 1/16.
    CHECK(throughput_step_exact(kHalf, {8, 4, 0.0}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(throughput_step_exact(kHalf, {8, 4, 1.0}) == 0.0);
    CHECK(throughput_step_exact(kHalf, {8, 4, 1.7}) == 0.0);
}

TEST_CASE("throughput_step_exact boundary atom at even Te, delta = 1/2, b = 0") {
    // With delta = 1/2 and no backoff, an even pilot window puts a binomial
    // atom exactly on the capacity boundary. The tie decodes, and the sum
    // then collapses to Tt/4 exactly -- the identity behind the Te = 4 case
    // above. Odd windows have no atom and track the Gaussian form closely.
    for (std::int64_t te : {2, 6, 100, 500}) {
        const EttConfig cfg{10000, te, 0.0};
        CHECK(throughput_step_exact(kHalf, cfg) ==
              doctest::Approx(0.25 * static_cast<double>(cfg.Tt())).epsilon(1e-12));
    }
    for (std::int64_t te : {101, 251, 999}) {
        const EttConfig cfg{10000, te, 0.0};
        const double exact = throughput_step_exact(kHalf, cfg);
        const double gauss = throughput_gauss(kHalf, cfg);
        CHECK(std::fabs(exact - gauss) / exact < 0.02);
    }
}

TEST_CASE("throughput_ppv hand enumeration and ordering") {
    const EttConfig cfg{4, 2, 0.0};
    // (1 - eps) * r per pilot count: upper-bound model gives
    // 2 * [1/4*0 + 1/2*(1/8)*(1/2) + 0] = 1/16; lower-bound model 23/32.
    CHECK(throughput_ppv(kHalf, cfg, ErrorModel::ppv_upper) ==
          doctest::Approx(1.0 / 16.0).epsilon(1e-12));
    CHECK(throughput_ppv(kHalf, cfg, ErrorModel::ppv_lower) ==
          doctest::Approx(23.0 / 32.0).epsilon(1e-12));

    const std::vector<EttConfig> cfgs = {
        {250, 50, 0.05}, {1000, 100, 0.02}, {64, 16, 0.0}};
    for (const auto& c : cfgs) {
        for (double delta : {0.3, 0.5}) {
            const Channel ch{delta};
            const double lo = throughput_ppv(ch, c, ErrorModel::ppv_upper);
            const double mid = throughput_ppv(ch, c, ErrorModel::ppv_mid);
            const double hi = throughput_ppv(ch, c, ErrorModel::ppv_lower);
            CHECK(lo <= mid + 1e-12);
            CHECK(mid <= hi + 1e-12);
        }
    }
    CHECK(throughput_ppv({0.3}, {10, 4, 1.0}, ErrorModel::ppv_mid) == 0.0);
}

TEST_CASE("throughput_gauss pinned values") {
    // Tt (1/4 - sqrt(1/(800 pi))) at T = 10000, Te = 100, b = 0.
    const double expected = 9900.0 * (0.25 - std::sqrt(1.0 / (800.0 * M_PI)));
    CHECK(throughput_gauss(kHalf, {10000, 100, 0.0}) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(std::fabs(throughput_gauss(kHalf, {10000, 100, 0.0}) - 2277.5) < 0.1);

    // 1 - delta - b = 0 leaves only the negative correction term.
    CHECK(throughput_gauss(kHalf, {10000, 400, 0.5}) <= 0.0);
}

TEST_CASE("throughput_step_exact in range and unimodal in backoff") {
    // Backing off has two effects: every decoded rate shrinks, but optimistic
    // estimates stop overshooting capacity. The net is a rise to an interior
    // maximum near the optimal backoff and a decline past it, as long as the
    // estimation window is short. Sampled on the estimate lattice (k/Te).
    const Channel ch{0.5};
    std::vector<double> vals;
    for (double b = 0.0; b <= 0.5 + 1e-12; b += 0.02) {
        const EttConfig cfg{200, 50, b};
        const double v = throughput_step_exact(ch, cfg);
        CHECK(v >= 0.0);
        CHECK(v <= static_cast<double>(cfg.Tt()));
        vals.push_back(v);
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        if (vals[i] > vals[peak]) peak = i;
    }
    CHECK(peak > 0);  // interior maximum, not at b = 0
    for (std::size_t i = 1; i <= peak; ++i) CHECK(vals[i] >= vals[i - 1] - 1e-9);
    for (std::size_t i = peak + 1; i < vals.size(); ++i) CHECK(vals[i] <= vals[i - 1] + 1e-9);
    // The sampled peak sits next to the optimal backoff for this window.
    const double b_star = backoff_for_eeff(ch, 50, optimal_eeff(ch, 50).eeff);
    CHECK(std::fabs(0.02 * static_cast<double>(peak) - b_star) <= 0.03);
}

TEST_CASE("berry-esseen gap between exact and gaussian eeff") {
    for (double b : {0.0, 0.02, 0.05}) {
        for (std::int64_t te : {25, 100, 400, 1600, 6400}) {
            const double gap =
                std::fabs(eeff_step_exact(kHalf, te, b) - eeff_step_gauss(kHalf, te, b));
            CHECK(gap <= 1.0 / std::sqrt(static_cast<double>(te)));
        }
    }
}

TEST_CASE("optimal_te matches sweep argmax and the known point") {
    const std::int64_t te = optimal_te(kHalf, 10000, 0.5);
    CHECK(std::llabs(te - 256) <= 2);
    const std::int64_t brute = sweep_argmax_te(kHalf, 10000, 0.5, 2, 2000);
    CHECK(std::llabs(te - brute) <= 2);

    // The continuous stationarity root itself, via the public residual.
    const double root = bisect_root(
        [&](double x) { return optimal_te_residual(kHalf, 10000, 0.5, x); }, 2.0, 9999.0);
    CHECK(std::fabs(root - 256.0) <= 2.0);
}

TEST_CASE("optimal_te follows the T^(2/3) law") {
    std::vector<std::pair<double, double>> pts;
    for (double logT : {3.0, 4.0, 5.0, 6.0}) {
        const auto T = static_cast<std::int64_t>(std::llround(std::pow(10.0, logT)));
        pts.emplace_back(static_cast<double>(T),
                         static_cast<double>(optimal_te(kHalf, T, 0.5)));
    }
    const double slope = fit_loglog_slope(pts);
    CHECK(std::fabs(slope - 2.0 / 3.0) <= 0.05);

    const double ratio = static_cast<double>(optimal_te(kHalf, 80000, 0.5)) /
                         static_cast<double>(optimal_te(kHalf, 10000, 0.5));
    CHECK(std::fabs(ratio - 4.0) <= 0.6);  // 8^(2/3) = 4, within 15%
}

TEST_CASE("optimal_te residual changes sign exactly once") {
    const std::vector<std::pair<Channel, std::int64_t>> cases = {
        {{0.5}, 10000}, {{0.3}, 100000}, {{0.8}, 4096}};
    for (const auto& [ch, T] : cases) {
        for (double eeff : {0.1, 0.5}) {
            int flips = 0;
            double prev = optimal_te_residual(ch, T, eeff, 2.0);
            for (double te = 2.0; te <= static_cast<double>(T - 1);
                 te *= 1.05) {
                const double cur = optimal_te_residual(ch, T, eeff, te);
                if ((cur > 0.0) != (prev > 0.0)) ++flips;
                prev = cur;
            }
            CHECK(flips == 1);
        }
    }
}

TEST_CASE("optimal_te matches the sweep argmax away from eeff = 1/2") {
    for (double eeff : {0.1, 0.3}) {
        const std::int64_t solved = optimal_te(kHalf, 10000, eeff);
        const std::int64_t brute = sweep_argmax_te(kHalf, 10000, eeff, 2, 3000);
        CHECK(std::llabs(solved - brute) <= 2);
    }
}

TEST_CASE("optimal_te with no admissible solution") {
    // eeff so small that the backoff swamps capacity across the whole bracket.
    CHECK_THROWS_AS(optimal_te(kHalf, 16, 1e-6), no_solution_error);
    // A horizon so short the optimum sits below the bracket saturates to 2.
    CHECK(optimal_te(kHalf, 4, 0.5) == 2);
}

TEST_CASE("optimal_eeff pinned value and sweep oracle") {
    const auto opt = optimal_eeff(kHalf, 100);
    CHECK(opt.interior);
    CHECK(std::fabs(opt.eeff - 0.046) <= 0.005);

    // Dense argmax over b at fixed Te (T >> Te so the Te term is negligible).
    double best_b = 0.0, best = -1e300;
    for (double b = 0.0; b <= 0.3; b += 0.0005) {
        const double v = throughput_gauss(kHalf, {100000, 100, b});
        if (v > best) {
            best = v;
            best_b = b;
        }
    }
    CHECK(std::fabs(eeff_step_gauss(kHalf, 100, best_b) - opt.eeff) <= 0.005);
}

TEST_CASE("optimal_eeff decreases with Te") {
    double prev = 1.0;
    for (std::int64_t te : {100, 400, 1600}) {
        const double e = optimal_eeff(kHalf, te).eeff;
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("optimal_eeff boundary case") {
    // (1 - delta) sqrt(Te / (2 pi delta(1-delta))) < 1/2 at delta = 0.9, Te = 4:
    // no interior optimum with b >= 0.
    const auto boundary = optimal_eeff({0.9}, 4);
    CHECK_FALSE(boundary.interior);
    CHECK(boundary.eeff == 0.5);
}

TEST_CASE("throughput_gauss is unimodal in the backoff") {
    std::vector<double> vals;
    for (double b = 0.0; b <= 0.2 + 1e-12; b += 0.0005) {
        vals.push_back(throughput_gauss(kHalf, {10000, 256, b}));
    }
    std::size_t peak = 0;
    for (std::size_t i = 1; i < vals.size(); ++i) {
        if (vals[i] > vals[peak]) peak = i;
    }
    for (std::size_t i = 1; i <= peak; ++i) CHECK(vals[i] >= vals[i - 1] - 1e-9);
    for (std::size_t i = peak + 1; i < vals.size(); ++i) CHECK(vals[i] <= vals[i - 1] + 1e-9);
}

TEST_CASE("joint_optimum self-consistency and dominance") {
    const auto joint = joint_optimum(kHalf, 10000);
    CHECK(joint.converged);
    CHECK(std::llabs(optimal_te(kHalf, 10000, joint.eeff) - joint.Te) <= 2);
    CHECK(std::fabs(optimal_eeff(kHalf, joint.Te).eeff - joint.eeff) <= 1e-3);

    const double joint_value = throughput_gauss(
        kHalf, {10000, joint.Te, backoff_for_eeff(kHalf, joint.Te, joint.eeff)});
    const double slice_value = throughput_gauss(kHalf, {10000, 256, 0.0});
    CHECK(joint_value >= slice_value);
}

TEST_CASE("joint_optimum agrees with a 2-D grid search") {
    std::int64_t best_te = 2;
    double best_eeff = 0.5, best = -1e300;
    for (std::int64_t te = 2; te <= 2000; ++te) {
        const double vte = static_cast<double>(te);
        for (int ei = 1; ei <= 500; ++ei) {
            const double eeff = 1e-3 * ei;
            const double x = q_inv(eeff);
            const double b = std::sqrt(0.25 / vte) * x;
            const double corr =
                std::sqrt(0.25 / (2.0 * M_PI * vte)) * std::exp(-0.5 * x * x);
            const double v =
                (10000.0 - vte) * ((0.5 - b) * (1.0 - eeff) - corr);
            if (v > best) {
                best = v;
                best_te = te;
                best_eeff = eeff;
            }
        }
    }
    const auto joint = joint_optimum(kHalf, 10000);
    CHECK(std::llabs(joint.Te - best_te) <= 3);
    CHECK(std::fabs(joint.eeff - best_eeff) <= 2e-3);
}

TEST_CASE("ett_report is internally consistent") {
    const EttConfig cfg{10000, 256, 0.0};
    const auto rep = ett_report(kHalf, cfg);
    CHECK(rep.eeff_exact == doctest::Approx(eeff_step_exact(kHalf, 256, 0.0)));
    CHECK(rep.eeff_gauss == doctest::Approx(0.5));
    CHECK(rep.N_ppv_lower <= rep.N_ppv_upper);
    CHECK(rep.N_exact >= 0.0);
    CHECK(rep.N_exact <= static_cast<double>(cfg.T));
    CHECK(rep.regret_step ==
          doctest::Approx(oracle_throughput(kHalf, 10000, rep.eeff_gauss) - rep.N_exact));
    // Pipeline regret at the optimum is positive and of order T^(2/3).
    const double t23 = std::pow(10000.0, 2.0 / 3.0);
    CHECK(rep.regret_step > 0.01 * t23);
    CHECK(rep.regret_step < 10.0 * t23);
}

TEST_CASE("config validation") {
    const EttConfig te_too_big{10, 10, 0.0};
    const EttConfig te_zero{10, 0, 0.0};
    const EttConfig negative_b{10, 5, -0.1};
    CHECK_THROWS_AS(te_too_big.validate(), std::domain_error);
    CHECK_THROWS_AS(te_zero.validate(), std::domain_error);
    CHECK_THROWS_AS(negative_b.validate(), std::domain_error);
}
