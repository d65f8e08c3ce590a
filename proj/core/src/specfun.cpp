#include "countkit/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "countkit/error.hpp"
#include "detail/bell.hpp"
#include "detail/math.hpp"
#include "detail/mittag_leffler.hpp"
#include "detail/series.hpp"

namespace countkit {

std::string_view error_code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::domain: return "domain_error";
        case ErrorCode::evaluation: return "evaluation_error";
        case ErrorCode::parse: return "parse_error";
        case ErrorCode::io: return "io_error";
    }
    return "error";
}

namespace detail {

double ml_contour_theta(double eta, double tau_max) {
    constexpr double pi = std::numbers::pi;
    if (eta <= 0.5) return pi;
    const double c = std::pow(10.0, -3.0 / std::max(tau_max, 1e-3));
    const double theta_c = (pi - std::asin(std::min(c, 1.0))) / eta;
    return std::min(std::max(pi / (2.0 * eta), theta_c), pi);
}

QuadResult ml_contour_block(double eta, double nu0, double tau0, double mu,
                            std::span<const double> log_pref, const QuadOptions& opt) {
    const std::size_t n = log_pref.size();
    const double theta = ml_contour_theta(eta, tau0 + static_cast<double>(n) - 1.0);
    const double p = eta * tau0 - nu0;
    std::vector<double> step(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) step[k] = std::exp(log_pref[k] - log_pref[k - 1]);

    auto g = [&](std::complex<double> s, std::span<std::complex<double>> out) {
        const std::complex<double> ls = std::log(s);
        const std::complex<double> q = std::exp(eta * ls) + mu;
        const std::complex<double> lq = std::log(q);
        out[0] = std::exp(s + p * ls - tau0 * lq + log_pref[0]);
        const std::complex<double> inv_q = 1.0 / q;
        for (std::size_t k = 1; k < n; ++k) out[k] = out[k - 1] * inv_q * step[k];
    };
    return hankel_integral(g, theta, 1.0, n, opt);
}

QuadResult wright_contour(double alpha, double omega, double y, const QuadOptions& opt) {
    constexpr double pi = std::numbers::pi;
    const double theta = alpha <= 0.5 ? pi : 0.5 * (0.5 * pi + 0.5 * pi / alpha);
    auto g = [&](std::complex<double> s, std::span<std::complex<double>> out) {
        const std::complex<double> ls = std::log(s);
        out[0] = std::exp(s - y * std::exp(alpha * ls) - omega * ls);
    };
    return hankel_integral(g, theta, 1.0, 1, opt);
}

}  // namespace detail

namespace specfun {

namespace {

constexpr double kSeriesTrust = 1e-13;       // estimated relative error tolerated before trying the contour
constexpr double kSeriesRefuse = 1e-4;       // and beyond which the series is never returned
constexpr double kCancellationLimit = 1e12;  // largest term (or integral of |integrand|) over |value|

bool series_trusted(const detail::SeriesSum& s) {
    return s.status == detail::SeriesStatus::ok && s.relative_error() <= kSeriesTrust &&
           s.cancellation() <= kCancellationLimit;
}

bool series_usable(const detail::SeriesSum& s) {
    return s.status == detail::SeriesStatus::ok && s.relative_error() <= kSeriesRefuse &&
           s.cancellation() <= kCancellationLimit;
}

void require_finite(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": argument must be finite");
}

SeriesValue from_series(const detail::SeriesSum& s) {
    return {s.value, std::max<std::size_t>(s.terms, 1), s.tail_bound, Method::series, s.cancellation()};
}

SeriesValue from_contour(const detail::QuadResult& q) {
    const double v = q.value[0];
    const double cond = v != 0.0 ? q.l1[0] / std::abs(v) : std::numeric_limits<double>::infinity();
    return {v, q.evaluations, q.error[0], Method::contour, cond};
}

bool contour_ok(const detail::QuadResult& q) {
    if (!q.converged || !std::isfinite(q.value[0]) || q.value[0] == 0.0) return false;
    return q.l1[0] <= kCancellationLimit * std::abs(q.value[0]);
}

// Given a usable contour value, prefer whichever route lost fewer digits.
SeriesValue pick(const detail::SeriesSum& s, const detail::QuadResult& q) {
    const SeriesValue c = from_contour(q);
    if (series_usable(s) && s.relative_error() < q.error[0] / std::abs(q.value[0])) return from_series(s);
    return c;
}

}  // namespace

double log_gamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) throw DomainError("log_gamma: x must be finite and positive");
    return detail::lgam(x);
}

double reciprocal_gamma(double x) {
    require_finite(x, "reciprocal_gamma");
    if (detail::is_nonpositive_integer(x)) return 0.0;
    if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
    int sign = 0;
    const double l = detail::log_abs_rgamma(x, sign);
    return sign * std::exp(l);
}

double digamma(double x) {
    if (!std::isfinite(x) || x <= 0.0) throw DomainError("digamma: x must be finite and positive");
    double acc = 0.0;
    while (x < 10.0) {
        acc -= 1.0 / x;
        x += 1.0;
    }
    const double r = 1.0 / (x * x);
    const double tail =
        r * (1.0 / 12 - r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * (691.0 / 32760 - r / 12))))));
    return acc + std::log(x) - 0.5 / x - tail;
}

SeriesValue prabhakar_ml(double eta, double nu, double tau, double w) {
    if (!(eta > 0.0) || !(nu > 0.0) || !(tau > 0.0))
        throw DomainError("prabhakar_ml: eta, nu, tau must be positive");
    require_finite(eta, "prabhakar_ml");
    require_finite(nu, "prabhakar_ml");
    require_finite(tau, "prabhakar_ml");
    require_finite(w, "prabhakar_ml");
    if (w == 0.0) return {reciprocal_gamma(nu), 1, 0.0, Method::series, 1.0};

    const double lw = std::log(std::abs(w));
    const double lg_tau = detail::lgam(tau);
    auto term = [&](std::size_t j) {
        const double jd = static_cast<double>(j);
        const double a = detail::lgam(tau + jd), b = detail::lgam(jd + 1.0), c = detail::lgam(eta * jd + nu);
        const double l = a - lg_tau - b - c + jd * lw;
        const double mag = std::abs(a) + std::abs(lg_tau) + std::abs(b) + std::abs(c) + std::abs(jd * lw);
        return detail::make_term(l, (w < 0.0 && (j & 1U)) ? -1 : 1, mag);
    };
    const detail::SeriesSum s = detail::sum_series(term);
    if (series_trusted(s)) return from_series(s);

    if (w < 0.0 && eta <= 1.0) {
        const std::array<double, 1> pref = {0.0};
        detail::QuadOptions opt;
        opt.abs_tol = 0.0;
        opt.rel_tol = 1e-14;
        const detail::QuadResult q = detail::ml_contour_block(eta, nu, tau, -w, pref, opt);
        if (contour_ok(q)) return pick(s, q);
    }
    if (series_usable(s)) return from_series(s);
    throw EvaluationError("prabhakar_ml: series cancellation or overflow beyond the evaluation guard "
                          "(eta=" + std::to_string(eta) + ", w=" + std::to_string(w) +
                          "); use the Monte Carlo representation instead");
}

SeriesValue wright_phi(double xi, double omega, double z) {
    if (!(xi > -1.0)) throw DomainError("wright_phi: xi must exceed -1");
    require_finite(xi, "wright_phi");
    require_finite(omega, "wright_phi");
    require_finite(z, "wright_phi");
    if (z == 0.0) return {reciprocal_gamma(omega), 1, 0.0, Method::series, 1.0};

    const double lz = std::log(std::abs(z));
    auto term = [&](std::size_t r) {
        const double rd = static_cast<double>(r);
        const double arg = xi * rd + omega;
        const double lf = detail::lgam(rd + 1.0);
        const double base = rd * lz - lf;
        int sg = 0;
        const double lrg = detail::log_abs_rgamma(arg, sg);
        const int sign = sg * ((z < 0.0 && (r & 1U)) ? -1 : 1);
        const double mag = std::abs(rd * lz) + std::abs(lf) + std::abs(detail::log_rgamma_envelope(arg));
        return detail::SeriesTerm{base + lrg, sign, base + detail::log_rgamma_envelope(arg), mag};
    };
    const detail::SeriesSum s = detail::sum_series(term);
    if (series_trusted(s)) return from_series(s);

    if (xi < 0.0 && z < 0.0) {
        detail::QuadOptions opt;
        opt.abs_tol = 0.0;
        opt.rel_tol = 1e-14;
        const detail::QuadResult q = detail::wright_contour(-xi, omega, -z, opt);
        if (contour_ok(q)) return pick(s, q);
    }
    if (series_usable(s)) return from_series(s);
    throw EvaluationError("wright_phi: series cancellation or overflow beyond the evaluation guard (xi=" +
                          std::to_string(xi) + ", z=" + std::to_string(z) + ")");
}

double m_wright(double alpha, double y) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("m_wright: alpha must lie in (0, 1)");
    if (!(y >= 0.0) || !std::isfinite(y)) throw DomainError("m_wright: y must be finite and non-negative");
    if (y == 0.0) return reciprocal_gamma(1.0 - alpha);

    // (1/pi) sum_{j>=1} (-y)^{j-1}/(j-1)! Gamma(alpha j) sin(pi alpha j)
    const double ly = std::log(y);
    auto term = [&](std::size_t i) {
        const double j = static_cast<double>(i + 1);
        const double sn = detail::sin_pi(alpha * j);
        const double a = detail::lgam(j), b = detail::lgam(alpha * j);
        const double env = static_cast<double>(i) * ly - a + b - std::log(std::numbers::pi);
        const double mag = std::abs(static_cast<double>(i) * ly) + std::abs(a) + std::abs(b) + 2.0;
        if (sn == 0.0) return detail::SeriesTerm{-INFINITY, 0, env, mag};
        const int sign = (sn > 0 ? 1 : -1) * ((i & 1U) ? -1 : 1);
        return detail::SeriesTerm{env + std::log(std::abs(sn)), sign, env, mag};
    };
    const detail::SeriesSum s = detail::sum_series(term);
    if (series_trusted(s)) return std::max(0.0, s.value);

    detail::QuadOptions opt;
    opt.abs_tol = 1e-17;
    opt.rel_tol = 1e-13;
    const detail::QuadResult q = detail::wright_contour(alpha, 1.0 - alpha, y, opt);
    if (q.converged && std::isfinite(q.value[0])) return std::max(0.0, q.value[0]);
    if (series_usable(s)) return std::max(0.0, s.value);
    throw EvaluationError("m_wright: evaluation failed for alpha=" + std::to_string(alpha) + ", y=" + std::to_string(y));
}

std::uint64_t stirling2(unsigned k, unsigned r) {
    if (r > k) throw DomainError("stirling2: r must not exceed k");
    std::vector<std::uint64_t> row(r + 1, 0);  // row[j] = S(m, j)
    row[0] = 1;
    for (unsigned m = 1; m <= k; ++m) {
        for (unsigned j = std::min(m, r); j >= 1; --j) {
            std::uint64_t prod = 0;
            std::uint64_t next = 0;
            if (__builtin_mul_overflow(static_cast<std::uint64_t>(j), row[j], &prod) ||
                __builtin_add_overflow(prod, row[j - 1], &next))
                throw EvaluationError("stirling2: S(" + std::to_string(k) + "," + std::to_string(r) +
                                      ") overflows 64 bits");
            row[j] = next;
        }
        row[0] = 0;
    }
    return row[r];
}

double bell_partial(unsigned n, unsigned k, std::span<const double> x) {
    if (k > n) throw DomainError("bell_partial: k must not exceed n");
    if (n > 0 && k > 0 && x.size() < n - k + 1)
        throw DomainError("bell_partial: need at least n-k+1 arguments");
    return detail::bell_partial_impl<double>(n, k, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("gamma_q: a must be finite and positive");
    if (!(x >= 0.0)) throw DomainError("gamma_q: x must be non-negative");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    const double log_front = -x + a * std::log(x) - detail::lgam(a);
    constexpr int kMaxIter = 1'000'000;
    if (x < a + 1.0) {
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < kMaxIter; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-17) return std::clamp(1.0 - sum * std::exp(log_front), 0.0, 1.0);
        }
    } else {
        // modified Lentz continued fraction
        constexpr double tiny = 1e-300;
        double b = x + 1.0 - a;
        double c = 1.0 / tiny;
        double d = 1.0 / b;
        double h = d;
        for (int i = 1; i < kMaxIter; ++i) {
            const double an = -i * (i - a);
            b += 2.0;
            d = an * d + b;
            if (std::abs(d) < tiny) d = tiny;
            c = b + an / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            const double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < 1e-16) return std::clamp(std::exp(log_front) * h, 0.0, 1.0);
        }
    }
    throw EvaluationError("gamma_q: no convergence for a=" + std::to_string(a) + ", x=" + std::to_string(x));
}

double chi2_sf(double x, double df) {
    if (!(df > 0.0) || !std::isfinite(df)) throw DomainError("chi2_sf: df must be finite and positive");
    if (!(x >= 0.0)) throw DomainError("chi2_sf: x must be non-negative");
    return gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace specfun
}  // namespace countkit
