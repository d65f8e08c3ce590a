#include "countkit/countdist.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>

#include "countkit/error.hpp"
#include "countkit/sampling.hpp"
#include "countkit/specfun.hpp"
#include "detail/math.hpp"
#include "detail/mittag_leffler.hpp"
#include "detail/quadrature.hpp"
#include "detail/series.hpp"

namespace countkit::countdist {

using detail::lgam;

namespace {

constexpr double kSeriesRelTol = 1e-12;

void check_unit_interval(double v, const char* name) {
    if (!(v > 0.0 && v <= 1.0)) throw DomainError(std::string("gfpd: ") + name + " must lie in (0, 1]");
}

// log of Gamma(beta) Gamma(delta + x) mu^x / (x! Gamma(delta))
double log_prefactor(const GfpdParams& p, double x) {
    return lgam(p.beta) - lgam(p.delta) + lgam(p.delta + x) - lgam(x + 1.0) + x * std::log(p.mu);
}

double geometric_pmf(double mu, double x) {
    return std::exp(x * (std::log(mu) - std::log1p(mu)) - std::log1p(mu));
}

// alpha = 1: Kummer's transformation turns the alternating series into
// e^{-mu} sum_j (beta - delta)_j mu^j / (j! Gamma(x + beta + j)), all terms positive.
double alpha_one_pmf(const GfpdParams& p, double x) {
    const double lp = log_prefactor(p, x) - p.mu;
    const double c = p.beta - p.delta;
    if (c <= 0.0) return std::exp(lp - lgam(x + p.beta));
    const double lmu = std::log(p.mu);
    const double lgc = lgam(c);
    auto term = [&](std::size_t j) {
        const double jd = static_cast<double>(j);
        const double a = lgam(c + jd), b = lgam(jd + 1.0), d = lgam(x + p.beta + jd);
        return detail::make_term(a - lgc - b - d + jd * lmu, 1, std::abs(a) + std::abs(b) + std::abs(d));
    };
    const detail::SeriesSum s = detail::sum_series(term);
    if (s.status != detail::SeriesStatus::ok)
        throw EvaluationError("gfpd_pmf: alpha = 1 series did not converge");
    return std::exp(lp) * s.value;
}

std::optional<double> series_pmf(const GfpdParams& p, double x) {
    const double lmu = std::log(p.mu);
    const double head = lgam(p.beta) - lgam(p.delta) - lgam(x + 1.0) + x * lmu;
    auto term = [&](std::size_t j) {
        const double jd = static_cast<double>(j);
        const double a = lgam(p.delta + x + jd), b = lgam(jd + 1.0), c = lgam(p.alpha * (x + jd) + p.beta);
        const double l = head + a - b - c + jd * lmu;
        const double mag = std::abs(head) + std::abs(a) + std::abs(b) + std::abs(c) + std::abs(jd * lmu);
        return detail::make_term(l, (j & 1U) ? -1 : 1, mag);
    };
    detail::SeriesOptions opt;
    opt.abort_log_term = term(0).log_abs + std::log(1e4);
    opt.max_terms = 100'000;
    const detail::SeriesSum s = detail::sum_series(term, opt);
    if (s.status != detail::SeriesStatus::ok || !(s.relative_error() <= kSeriesRelTol)) return std::nullopt;
    return std::max(0.0, s.value);
}

detail::QuadOptions contour_options() {
    detail::QuadOptions opt;
    opt.abs_tol = 1e-300;
    opt.rel_tol = 1e-12;
    opt.max_intervals = 20'000;
    return opt;
}

std::vector<double> contour_pmf(const GfpdParams& p, std::size_t x_lo, std::size_t x_hi) {
    std::vector<double> lp(x_hi - x_lo + 1);
    for (std::size_t i = 0; i < lp.size(); ++i) lp[i] = log_prefactor(p, static_cast<double>(x_lo + i));
    const double xl = static_cast<double>(x_lo);
    const detail::QuadResult q =
        detail::ml_contour_block(p.alpha, p.alpha * xl + p.beta, p.delta + xl, p.mu, lp, contour_options());
    if (!q.converged)
        throw EvaluationError("gfpd_pmf: contour quadrature did not converge (alpha=" + std::to_string(p.alpha) +
                              ", mu=" + std::to_string(p.mu) + "); use gfpd_pmf_mc");
    std::vector<double> out(q.value.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(q.value[i], 0.0, 1.0);
    return out;
}

double log_beta(double a, double b) { return lgam(a) + lgam(b) - lgam(a + b); }

// mu^x/x! * mean(Y^{x+shift} e^{-mu Y}) with Y = S^{-alpha}
McEstimate stable_expectation(double alpha, double mu, double x, double shift, std::size_t n,
                              sampling::RngStream& rng) {
    if (n == 0) throw DomainError("Monte Carlo sample size must be at least 1");
    const double head = x * std::log(mu) - lgam(x + 1.0);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = sampling::sample_mwright(alpha, rng);
        const double v = y > 0.0 ? std::exp(head + (x + shift) * std::log(y) - mu * y) : (x + shift == 0.0 ? std::exp(head) : 0.0);
        const double d = v - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (v - mean);
    }
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n)), n};
}

// Wright phi(-alpha, omega; -y) to absolute accuracy.
double wright_density_factor(double alpha, double omega, double y) {
    try {
        return specfun::wright_phi(-alpha, omega, -y).value;
    } catch (const EvaluationError&) {
        detail::QuadOptions opt;
        opt.abs_tol = 1e-17;
        opt.rel_tol = 1e-12;
        const detail::QuadResult q = detail::wright_contour(alpha, omega, y, opt);
        if (!q.converged) throw;
        return q.value[0];
    }
}

}  // namespace

GfpdParams GfpdParams::make(double alpha, double beta, double delta, double mu) {
    check_unit_interval(alpha, "alpha");
    check_unit_interval(beta, "beta");
    if (!(delta > 0.0) || delta > (beta / alpha) * (1.0 + 1e-12))
        throw DomainError("gfpd: delta must lie in (0, beta/alpha]");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("gfpd: mu must be finite and positive");
    return GfpdParams{alpha, beta, delta, mu, false};
}

GfpdParams GfpdParams::fpd(double alpha, double mu) { return make(alpha, 1.0, 1.0, mu); }

GfpdParams GfpdParams::fpd_geometric_limit(double mu) {
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("gfpd: mu must be finite and positive");
    return GfpdParams{0.0, 1.0, 1.0, mu, true};
}

GfpdParams GfpdParams::aa1(double alpha, double mu) { return make(alpha, alpha, 1.0, mu); }

double gfpd_pmf(const GfpdParams& p, std::uint64_t x) {
    const double xd = static_cast<double>(x);
    if (p.geometric_limit) return geometric_pmf(p.mu, xd);
    if (p.alpha == 1.0) return alpha_one_pmf(p, xd);
    if (auto v = series_pmf(p, xd)) return *v;
    return contour_pmf(p, x, x)[0];
}

std::vector<double> gfpd_pmf_table(const GfpdParams& p, std::size_t x_max) {
    std::vector<double> out(x_max + 1);
    if (p.geometric_limit || p.alpha == 1.0) {
        for (std::size_t x = 0; x <= x_max; ++x) out[x] = gfpd_pmf(p, x);
        return out;
    }
    return contour_pmf(p, 0, x_max);
}

std::vector<double> gfpd_pmf_support(const GfpdParams& p, std::size_t x_cap) {
    const SummaryStats s = gfpd_summary(p);
    std::size_t x_max = static_cast<std::size_t>(std::ceil(s.mean + 20.0 * std::sqrt(s.variance) + 30.0));
    for (;;) {
        x_max = std::min(x_max, x_cap);
        std::vector<double> t = gfpd_pmf_table(p, x_max);
        const std::size_t mode = static_cast<std::size_t>(std::max_element(t.begin(), t.end()) - t.begin());
        std::size_t run = 0;
        for (std::size_t x = mode; x < t.size(); ++x) {
            run = t[x] < 1e-14 ? run + 1 : 0;
            if (run == 10) {
                t.resize(x + 1);
                return t;
            }
        }
        if (x_max == x_cap) throw EvaluationError("gfpd_pmf_support: tail extends beyond the cap");
        x_max *= 2;
    }
}

McEstimate gfpd_pmf_mc(const GfpdParams& p, std::uint64_t x, std::size_t n, sampling::RngStream& rng) {
    if (n == 0) throw DomainError("gfpd_pmf_mc: n must be at least 1");
    const double xd = static_cast<double>(x);
    if (p.geometric_limit) return {geometric_pmf(p.mu, xd), 0.0, 0};
    if (p.alpha == 1.0 && p.is_fpd()) return {std::exp(xd * std::log(p.mu) - p.mu - lgam(xd + 1.0)), 0.0, 0};
    if (p.is_fpd()) return stable_expectation(p.alpha, p.mu, xd, 0.0, n, rng);
    if (p.beta == p.alpha && p.delta == 1.0) {
        McEstimate e = stable_expectation(p.alpha, p.mu, xd, 1.0, n, rng);
        const double g = std::tgamma(p.alpha + 1.0);
        return {e.value * g, e.std_error * g, n};
    }

    // Wright-function integral over y; std_error carries the quadrature error estimate.
    const double omega = p.beta - p.alpha * p.delta;
    const double power = p.delta + xd;
    const double scale = power / p.mu;
    const bool sub = power < 1.0;  // y = v^{1/power} removes the y^{power-1} singularity
    const double lp = log_prefactor(p, xd) - lgam(p.delta + xd);
    auto f = [&](double t, std::span<double> out) {
        const double v = scale * t / (1.0 - t);
        const double dv = scale / ((1.0 - t) * (1.0 - t));
        double y, log_w;
        if (sub) {
            y = std::pow(v, 1.0 / power);
            log_w = -std::log(power);
        } else {
            y = v;
            log_w = (power - 1.0) * std::log(y);
        }
        if (!(y > 0.0) || !std::isfinite(y)) {
            out[0] = 0.0;
            return;
        }
        const double e = std::exp(lp + log_w - p.mu * y);
        out[0] = e == 0.0 ? 0.0 : e * wright_density_factor(p.alpha, omega, y) * dv;
    };
    const std::array<double, 5> breaks = {0.0, 0.25, 0.5, 0.75, 1.0};
    detail::QuadOptions opt;
    opt.abs_tol = 1e-14;
    opt.rel_tol = 1e-10;
    const detail::QuadResult q = detail::integrate_adaptive(f, breaks, 1, opt);
    if (!q.converged) throw EvaluationError("gfpd_pmf_mc: Wright-integral quadrature did not converge");
    return {q.value[0], q.error[0], 0};
}

double fpd_cdf_series(double alpha, double mu, std::uint64_t x) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("fpd_cdf_series: alpha must lie in (0, 1)");
    if (!(mu > 0.0)) throw DomainError("fpd_cdf_series: mu must be positive");
    const double xd = static_cast<double>(x);
    const double lmu = std::log(mu);
    const double lgx = lgam(xd + 1.0);
    // F(x) = sum_r C(x+r+1, x) (-1)^r mu^{-(r+1)} / Gamma(1 - alpha (r+1)), optimally truncated
    double sum = 0.0;
    double comp = 0.0;
    double prev_env = INFINITY;
    double min_env = INFINITY;
    std::size_t small_run = 0;
    for (std::size_t r = 0; r < 100'000; ++r) {
        const double rd = static_cast<double>(r);
        const double lb = lgam(xd + rd + 2.0) - lgx - lgam(rd + 2.0) - (rd + 1.0) * lmu;
        const double arg = 1.0 - alpha * (rd + 1.0);
        const double env = std::exp(lb + detail::log_rgamma_envelope(arg));
        if (env > prev_env && r > xd + 2.0 && env > min_env) break;  // past the smallest term
        prev_env = env;
        min_env = std::min(min_env, env);
        int sg = 0;
        const double lrg = detail::log_abs_rgamma(arg, sg);
        const double v = sg == 0 ? 0.0 : ((r & 1U) ? -1.0 : 1.0) * sg * std::exp(lb + lrg);
        const double next = sum + v;
        if (std::abs(sum) >= std::abs(v)) comp += (sum - next) + v;
        else comp += (v - next) + sum;
        sum = next;
        small_run = env <= 1e-15 * std::abs(sum + comp) ? small_run + 1 : 0;
        if (small_run >= 5) return sum + comp;
    }
    if (min_env <= 1e-10) return sum + comp;
    throw EvaluationError("fpd_cdf_series: the large-mu series does not reach 1e-10 at alpha=" +
                          std::to_string(alpha) + ", mu=" + std::to_string(mu) + "; use pmf summation");
}

CdfResult fpd_cdf(double alpha, double mu, std::uint64_t x) {
    const GfpdParams p = GfpdParams::fpd(alpha, mu);
    const std::vector<double> t = gfpd_pmf_table(p, x);
    double acc = 0.0;
    for (double v : t) acc += v;
    CdfResult res;
    res.value = std::min(acc, 1.0);
    res.method = CdfMethod::pmf_sum;
    res.series_value = std::numeric_limits<double>::quiet_NaN();
    res.series_flagged = true;
    if (x > 0 && alpha < 1.0) {
        try {
            res.series_value = fpd_cdf_series(alpha, mu, x);
            res.series_flagged = !(std::abs(res.series_value - res.value) <= 1e-6);
        } catch (const EvaluationError&) {
        }
    }
    return res;
}

FactorialMomentSequence gfpd_factorial_moments(const GfpdParams& p, std::size_t K) {
    FactorialMomentSequence a(K + 1);
    a[0] = 1.0;
    const double lmu = std::log(p.mu);
    for (std::size_t k = 1; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        double l;
        if (p.geometric_limit) l = lgam(kd + 1.0) + kd * lmu;
        else l = lgam(p.beta) + lgam(p.delta + kd) - lgam(p.alpha * kd + p.beta) - lgam(p.delta) + kd * lmu;
        if (l > 709.0) throw EvaluationError("gfpd_factorial_moments: a_" + std::to_string(k) + " overflows");
        a[k] = std::exp(l);
    }
    return a;
}

double moments_from_factorial(const FactorialMomentSequence& a, std::size_t k) {
    if (a.empty() || k >= a.size()) throw DomainError("moments_from_factorial: sequence too short for order k");
    if (k == 0) return 1.0;
    double m = 0.0;
    for (std::size_t r = 1; r <= k; ++r)
        m += static_cast<double>(specfun::stirling2(static_cast<unsigned>(k), static_cast<unsigned>(r))) * a[r];
    return m;
}

double skewness_from_factorial(double a1, double a2, double a3) {
    const double v = a1 + a2 - a1 * a1;
    if (!(v > 0.0)) throw DomainError("skewness_from_factorial: variance expression must be positive");
    return (a3 + 3.0 * a2 + a1 * (1.0 - 3.0 * a2 + a1 * (2.0 * a1 - 3.0))) / std::pow(v, 1.5);
}

SummaryStats gfpd_summary(const GfpdParams& p) {
    const FactorialMomentSequence a = gfpd_factorial_moments(p, 3);
    SummaryStats s;
    s.mean = a[1];
    s.variance = a[1] + a[2] - a[1] * a[1];
    s.skewness = skewness_from_factorial(a[1], a[2], a[3]);
    s.fisher_index = s.variance / s.mean;
    return s;
}

double fpd_skewness_limit(double alpha, SkewCase which) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("fpd_skewness_limit: alpha must lie in (0, 1]");
    if (alpha == 1.0) return 0.0;
    // Leading mu^3 and mu^2 coefficients of a_3 - 3 a_1 a_2 + 2 a_1^3 and a_2 - a_1^2
    // with a_k = c mu^k k! / Gamma(b + alpha k).
    const double b = which == SkewCase::fpd ? 1.0 : alpha;
    const double c = which == SkewCase::fpd ? 1.0 : std::tgamma(alpha);
    const double g1 = c / std::tgamma(b + alpha);
    const double g2 = 2.0 * c / std::tgamma(b + 2.0 * alpha);
    const double g3 = 6.0 * c / std::tgamma(b + 3.0 * alpha);
    return (g3 - 3.0 * g1 * g2 + 2.0 * g1 * g1 * g1) / std::pow(g2 - g1 * g1, 1.5);
}

double overdispersion_delta_bound(double alpha, double beta) {
    check_unit_interval(alpha, "alpha");
    check_unit_interval(beta, "beta");
    const double b1 = std::exp(log_beta(alpha + beta, alpha));
    const double b0 = std::exp(log_beta(beta, alpha));
    return b1 / (b0 - b1);
}

McEstimate gfpd_aa1_pmf(double alpha, double mu, std::uint64_t x, std::size_t n, sampling::RngStream& rng) {
    const GfpdParams p = GfpdParams::aa1(alpha, mu);
    try {
        return {gfpd_pmf(p, x), 0.0, 0};
    } catch (const EvaluationError&) {
        return gfpd_pmf_mc(p, x, n, rng);
    }
}

double pmf_from_factorial(const FactorialMomentSequence& a, std::uint64_t x) {
    if (a.empty() || a[0] != 1.0) throw DomainError("pmf_from_factorial: a[0] must equal 1");
    if (x >= a.size()) throw EvaluationError("pmf_from_factorial: sequence shorter than x");
    double sum = 0.0;
    double comp = 0.0;
    std::size_t small_run = 0;
    for (std::size_t k = 0; x + k < a.size(); ++k) {
        const double v = ((k & 1U) ? -1.0 : 1.0) * a[x + k] * std::exp(-lgam(static_cast<double>(k) + 1.0));
        const double next = sum + v;
        if (std::abs(sum) >= std::abs(v)) comp += (sum - next) + v;
        else comp += (v - next) + sum;
        sum = next;
        small_run = std::abs(v) <= 1e-15 * std::abs(sum + comp) || v == 0.0 ? small_run + 1 : 0;
        if (small_run >= 5) return (sum + comp) * std::exp(-lgam(static_cast<double>(x) + 1.0));
    }
    throw EvaluationError("pmf_from_factorial: factorial-moment sequence too short for the alternating tail");
}

}  // namespace countkit::countdist
