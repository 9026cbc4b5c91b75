#include "erasure/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace erasure {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Thread-safe log-gamma (std::lgamma writes the global signgam on glibc).
double log_gamma(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

double horner(const double* c, int n, double x) {
    double v = c[n - 1];
    for (int i = n - 2; i >= 0; --i) v = v * x + c[i];
    return v;
}

// Inverse normal CDF, algorithm AS241 (Wichura 1988), ~1 ulp over (0, 1).
double inverse_norm_cdf(double u) {
    // Coefficients for |u - 0.5| <= 0.425.
    static const double A[8] = {3.3871328727963666080e0,  1.3314166789178437745e+2,
                                1.9715909503065514427e+3, 1.3731693765509461125e+4,
                                4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                3.3430575583588128105e+4, 2.5090809287301226727e+3};
    static const double B[8] = {1.0,
                                4.2313330701600911252e+1,
                                6.8718700749205790830e+2,
                                5.3941960214247511077e+3,
                                2.1213794301586595867e+4,
                                3.9307895800092710610e+4,
                                2.8729085735721942674e+4,
                                5.2264952788528545610e+3};
    // Coefficients for the near tail, r = sqrt(-log(min(u, 1-u))) < 5.
    static const double C[8] = {1.42343711074968357734e0,  4.63033784615654529590e0,
                                5.76949722146069140550e0,  3.64784832476320460504e0,
                                1.27045825245236838258e0,  2.41780725177450611770e-1,
                                2.27238449892691845833e-2, 7.74545014278341407640e-4};
    static const double D[8] = {1.0,
                                2.05319162663775882187e0,
                                1.67638483018380384940e0,
                                6.89767334985100004550e-1,
                                1.48103976427480074590e-1,
                                1.51986665636164571966e-2,
                                5.47593808499534494600e-4,
                                1.05075007164441684324e-9};
    // Coefficients for the far tail, r >= 5.
    static const double E[8] = {6.65790464350110377720e0,  5.46378491116411436990e0,
                                1.78482653991729133580e0,  2.96560571828504891230e-1,
                                2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                2.71155556874348757815e-5, 2.01033439929228813265e-7};
    static const double F[8] = {1.0,
                                5.99832206555887937690e-1,
                                1.36929880922735805310e-1,
                                1.48753612908506148525e-2,
                                7.86869131145613259100e-4,
                                1.84631831751005468180e-5,
                                1.42151175831644588870e-7,
                                2.04426310338993978564e-15};

    const double q = u - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * horner(A, 8, r) / horner(B, 8, r);
    }
    double r = q < 0.0 ? u : 1.0 - u;
    r = std::sqrt(-std::log(r));
    double ret;
    if (r < 5.0) {
        r -= 1.6;
        ret = horner(C, 8, r) / horner(D, 8, r);
    } else {
        r -= 5.0;
        ret = horner(E, 8, r) / horner(F, 8, r);
    }
    return q < 0.0 ? -ret : ret;
}

}  // namespace

void Tolerance::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iter < 1) {
        throw std::domain_error("Tolerance: abs_tol > 0, rel_tol > 0, max_iter >= 1 required");
    }
}

double q_func(double x) {
    if (!std::isfinite(x)) {
        throw std::domain_error("q_func: input must be finite");
    }
    return 0.5 * std::erfc(x * kInvSqrt2);
}

double normal_pdf(double x) { return kInvSqrt2Pi * std::exp(-0.5 * x * x); }

double q_inv(double p) {
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("q_inv: p must lie in (0, 1)");
    }
    // Q(x) = p  <=>  x = -Phi^{-1}(p); the tail branch of AS241 works directly
    // on small p, so no cancellation in 1 - p occurs where it would matter.
    double x = -inverse_norm_cdf(p);
    // Two Newton polishes against q_func; skipped when the density underflows
    // (out there AS241 is already as good as doubles allow).
    for (int i = 0; i < 2; ++i) {
        const double pdf = normal_pdf(x);
        if (pdf <= std::numeric_limits<double>::min()) break;
        x += (q_func(x) - p) / pdf;
    }
    return x;
}

double log_binom_pmf(std::int64_t n, std::int64_t k, double p) {
    if (n < 0 || k < 0 || k > n) {
        throw std::domain_error("log_binom_pmf: need 0 <= k <= n");
    }
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("log_binom_pmf: need 0 < p < 1");
    }
    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    double lg = log_gamma(nd + 1.0) - log_gamma(kd + 1.0) - log_gamma(nd - kd + 1.0);
    return lg + kd * std::log(p) + (nd - kd) * std::log1p(-p);
}

double binom_cdf(std::int64_t n, std::int64_t k, double p) {
    if (n < 0) throw std::domain_error("binom_cdf: n must be >= 0");
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("binom_cdf: need 0 < p < 1");
    }
    if (k < 0) return 0.0;
    if (k >= n) return 1.0;
    detail::KahanSum acc;
    for (std::int64_t j = 0; j <= k; ++j) {
        acc.add(std::exp(log_binom_pmf(n, j, p)));
    }
    return std::min(acc.value(), 1.0);
}

std::vector<double> binom_log_pmf_table(std::int64_t n, double p) {
    if (n < 0) throw std::domain_error("binom_log_pmf_table: n must be >= 0");
    if (!(p > 0.0) || !(p < 1.0)) {
        throw std::domain_error("binom_log_pmf_table: need 0 < p < 1");
    }
    std::vector<double> table(static_cast<std::size_t>(n) + 1);
    const double lg_n1 = log_gamma(static_cast<double>(n) + 1.0);
    const double log_p = std::log(p);
    const double log_q = std::log1p(-p);
    for (std::int64_t k = 0; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double nd = static_cast<double>(n);
        table[static_cast<std::size_t>(k)] =
            lg_n1 - log_gamma(kd + 1.0) - log_gamma(nd - kd + 1.0) + kd * log_p + (nd - kd) * log_q;
    }
    return table;
}

double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                   const Tolerance& tol) {
    tol.validate();
    double a = std::min(lo, hi);
    double b = std::max(lo, hi);
    double fa = f(a);
    double fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if ((fa > 0.0) == (fb > 0.0)) {
        throw bracketing_error("bisect_root: f(lo) and f(hi) have the same sign");
    }
    double mid = 0.5 * (a + b);
    for (int i = 0; i < tol.max_iter; ++i) {
        mid = 0.5 * (a + b);
        const double fm = f(mid);
        if (std::fabs(fm) <= tol.abs_tol) return mid;
        if ((b - a) <= tol.abs_tol + tol.rel_tol * std::fabs(mid)) return mid;
        if ((fm > 0.0) == (fa > 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    throw convergence_error("bisect_root: max_iter exceeded", mid);
}

double fit_loglog_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) {
        throw std::domain_error("fit_loglog_slope: need at least 2 points");
    }
    double mx = 0.0, my = 0.0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw std::domain_error("fit_loglog_slope: coordinates must be positive");
        }
        mx += std::log(x);
        my += std::log(y);
    }
    const double n = static_cast<double>(points.size());
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (sxx == 0.0) {
        throw std::domain_error("fit_loglog_slope: degenerate x values");
    }
    return sxy / sxx;
}

double snap_near_integer(double x) {
    const double r = std::nearbyint(x);
    if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x))) return r;
    return x;
}

}  // namespace erasure
