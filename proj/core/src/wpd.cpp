#include "countkit/wpd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "countkit/error.hpp"
#include "detail/math.hpp"

namespace countkit::wpd {

using detail::lgam;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_add(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(-std::abs(a - b)));
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw DomainError("wpd: " + msg);
}

// log of t_{k+1} / t_k for t_k = lambda^k w(k) / k!, k >= 1 or beta > 0.
double log_multiplier(const WpdParams& p, double k) {
    double l = std::log(p.lambda) + std::log(k + p.gamma) - std::log(k + 1.0);
    if (p.nu != 0.0 && p.alpha != 0.0) {
        if (p.alpha == 1.0) l -= p.nu * std::log(k + p.beta);
        else l -= p.nu * (lgam(p.alpha * k + p.alpha + p.beta) - lgam(p.alpha * k + p.beta));
    }
    return l;
}

double log_term(const WpdParams& p, double k) {
    return k * std::log(p.lambda) - lgam(k + 1.0) + log_weight(p, static_cast<std::uint64_t>(k));
}

// Trigamma psi'(c) = sum_r (c + r)^{-2}, c > 0.
double trigamma(double c) {
    double acc = 0.0;
    while (c < 10.0) {
        acc += 1.0 / (c * c);
        c += 1.0;
    }
    const double r = 1.0 / c;
    const double r2 = r * r;
    return acc + r + 0.5 * r2 + r * r2 * (1.0 / 6 - r2 * (1.0 / 30 - r2 * (1.0 / 42 - r2 * (1.0 / 30 - r2 * 5.0 / 66))));
}

}  // namespace

WpdParams WpdParams::make(double alpha, double beta, double gamma, double nu, double lambda) {
    require(std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma) && std::isfinite(nu) &&
                std::isfinite(lambda),
            "parameters must be finite");
    require(gamma > 0.0, "gamma must be positive");
    require(alpha >= 0.0 && beta >= 0.0 && nu >= 0.0, "alpha, beta, nu must be non-negative");
    require(alpha + beta > 0.0, "alpha + beta must be positive");
    require(beta > 0.0, "beta = 0 is only admitted as the Model I limit (make_special_case)");
    require(lambda > 0.0, "lambda must be positive");
    require(alpha * nu > 0.0 || lambda < 1.0, "with alpha * nu = 0 the normalizer converges only for lambda < 1");
    return WpdParams{alpha, beta, gamma, nu, lambda, SpecialCase::general, false};
}

WpdParams make_special_case(SpecialCase tag, const FreeParams& f) {
    auto need = [&](const std::optional<double>& v, const char* name) {
        if (!v) throw DomainError(std::string("wpd: ") + std::string(tag_name(tag)) + " requires " + name);
        return *v;
    };
    WpdParams p;
    switch (tag) {
        case SpecialCase::general:
            p = WpdParams::make(need(f.alpha, "alpha"), need(f.beta, "beta"), need(f.gamma, "gamma"), need(f.nu, "nu"),
                                need(f.lambda, "lambda"));
            break;
        case SpecialCase::poisson: p = WpdParams::make(1, 1, 1, 1, need(f.lambda, "lambda")); break;
        case SpecialCase::com_poisson: p = WpdParams::make(1, 1, 1, need(f.nu, "nu"), need(f.lambda, "lambda")); break;
        case SpecialCase::hyper_poisson:
            p = WpdParams::make(1, need(f.beta, "beta"), 1, 1, need(f.lambda, "lambda"));
            break;
        case SpecialCase::alt_mittag_leffler:
            p = WpdParams::make(need(f.alpha, "alpha"), need(f.beta, "beta"), 1, 1, need(f.lambda, "lambda"));
            break;
        case SpecialCase::fractional_com_poisson:
            p = WpdParams::make(need(f.alpha, "alpha"), need(f.beta, "beta"), 1, need(f.nu, "nu"),
                                need(f.lambda, "lambda"));
            break;
        case SpecialCase::alt_generalized_ml:
            p = WpdParams::make(need(f.alpha, "alpha"), need(f.beta, "beta"), need(f.gamma, "gamma"), 1,
                                need(f.lambda, "lambda"));
            break;
        case SpecialCase::model_I: {
            const double beta = need(f.beta, "beta");
            const double nu = need(f.nu, "nu");
            const double lambda = need(f.lambda, "lambda");
            if (beta == 0.0) {
                require(nu >= 1.0, "Model I admits beta = 0 only for nu >= 1");
                require(lambda > 0.0 && std::isfinite(lambda), "lambda must be positive");
                p = WpdParams{1.0, 0.0, 0.0, nu, lambda, SpecialCase::model_I, true};
                return p;
            }
            p = WpdParams::make(1, beta, beta, nu, lambda);
            break;
        }
        case SpecialCase::model_I_2param: {
            const double beta = need(f.beta, "beta");
            p = WpdParams::make(1, beta, beta, beta, need(f.lambda, "lambda"));
            break;
        }
        case SpecialCase::model_II:
        case SpecialCase::model_II_2param: {
            const double gamma = need(f.gamma, "gamma");
            double beta;
            if (f.xi) {
                require(!f.beta, "give either beta or xi, not both");
                beta = *f.xi * gamma;
            } else {
                beta = need(f.beta, "beta");
            }
            const double lambda = tag == SpecialCase::model_II ? need(f.lambda, "lambda") : 1.0;
            if (tag == SpecialCase::model_II_2param && f.lambda && *f.lambda != 1.0)
                throw DomainError("wpd: model_II_2param fixes lambda = 1");
            p = WpdParams::make(1, beta, gamma, 1, lambda);
            break;
        }
    }
    p.tag = tag;
    return p;
}

std::string_view tag_name(SpecialCase tag) {
    switch (tag) {
        case SpecialCase::general: return "wpd";
        case SpecialCase::poisson: return "poisson";
        case SpecialCase::com_poisson: return "com_poisson";
        case SpecialCase::hyper_poisson: return "hyper_poisson";
        case SpecialCase::alt_mittag_leffler: return "alt_mittag_leffler";
        case SpecialCase::fractional_com_poisson: return "fractional_com_poisson";
        case SpecialCase::alt_generalized_ml: return "alt_generalized_ml";
        case SpecialCase::model_I: return "model_I";
        case SpecialCase::model_I_2param: return "model_I_2param";
        case SpecialCase::model_II: return "model_II";
        case SpecialCase::model_II_2param: return "model_II_2param";
    }
    return "wpd";
}

std::optional<SpecialCase> parse_tag(std::string_view name) {
    constexpr std::array all = {SpecialCase::general,       SpecialCase::poisson,
                                SpecialCase::com_poisson,   SpecialCase::hyper_poisson,
                                SpecialCase::alt_mittag_leffler, SpecialCase::fractional_com_poisson,
                                SpecialCase::alt_generalized_ml, SpecialCase::model_I,
                                SpecialCase::model_I_2param, SpecialCase::model_II,
                                SpecialCase::model_II_2param};
    for (SpecialCase t : all)
        if (tag_name(t) == name) return t;
    return std::nullopt;
}

std::vector<std::string> free_param_names(SpecialCase tag) {
    switch (tag) {
        case SpecialCase::general: return {"lambda", "alpha", "beta", "gamma", "nu"};
        case SpecialCase::poisson: return {"lambda"};
        case SpecialCase::com_poisson: return {"lambda", "nu"};
        case SpecialCase::hyper_poisson: return {"lambda", "beta"};
        case SpecialCase::alt_mittag_leffler: return {"lambda", "alpha", "beta"};
        case SpecialCase::fractional_com_poisson: return {"lambda", "alpha", "beta", "nu"};
        case SpecialCase::alt_generalized_ml: return {"lambda", "alpha", "beta", "gamma"};
        case SpecialCase::model_I: return {"lambda", "beta", "nu"};
        case SpecialCase::model_I_2param: return {"lambda", "beta"};
        case SpecialCase::model_II: return {"lambda", "beta", "gamma"};
        case SpecialCase::model_II_2param: return {"beta", "gamma"};
    }
    return {};
}

std::vector<double> free_vector(const WpdParams& p) {
    std::vector<double> v;
    for (const std::string& n : free_param_names(p.tag)) {
        if (n == "lambda") v.push_back(p.lambda);
        else if (n == "alpha") v.push_back(p.alpha);
        else if (n == "beta") v.push_back(p.beta);
        else if (n == "gamma") v.push_back(p.gamma);
        else if (n == "nu") v.push_back(p.nu);
    }
    return v;
}

WpdParams from_free_vector(SpecialCase tag, std::span<const double> v) {
    const std::vector<std::string> names = free_param_names(tag);
    if (v.size() != names.size())
        throw DomainError("wpd: " + std::string(tag_name(tag)) + " takes " + std::to_string(names.size()) +
                          " parameters");
    FreeParams f;
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == "lambda") f.lambda = v[i];
        else if (names[i] == "alpha") f.alpha = v[i];
        else if (names[i] == "beta") f.beta = v[i];
        else if (names[i] == "gamma") f.gamma = v[i];
        else if (names[i] == "nu") f.nu = v[i];
    }
    return make_special_case(tag, f);
}

double log_weight(const WpdParams& p, std::uint64_t k) {
    const double kd = static_cast<double>(k);
    if (p.beta_zero_limit) {
        if (k == 0) return p.nu == 1.0 ? 0.0 : kNegInf;
        return (1.0 - p.nu) * lgam(kd);
    }
    double l = lgam(kd + p.gamma);
    if (p.nu != 0.0) l -= p.nu * lgam(p.alpha * kd + p.beta);
    if (!std::isfinite(l) && l > 0.0)
        throw EvaluationError("wpd: log weight overflows at k=" + std::to_string(k));
    return l;
}

double weight(const WpdParams& p, std::uint64_t k) { return std::exp(log_weight(p, k)); }

EtaValue eta(const WpdParams& p, const EtaOptions& opt) {
    // Terms t_k = lambda^k w(k) / k! are accumulated in log space against a
    // moving reference. The tail after t_k is bounded by t_{k+1} / (1 - eps)
    // once the multiplier t_{j+1}/t_j is certified monotone and below eps.
    const double r_inf = p.alpha * p.nu > 0.0 ? 0.0 : p.lambda;
    constexpr std::size_t kWindow = 64;
    constexpr std::size_t kResync = 1024;

    if (p.alpha * p.nu > 0.0) {
        // r_k ~ lambda alpha^{-alpha nu} k^{-alpha nu}: the certificate cannot start before r_k < eps.
        const double an = p.alpha * p.nu;
        const double log_k_star = (std::log(p.lambda) - an * std::log(p.alpha) - std::log(opt.epsilon)) / an;
        if (log_k_star > std::log(2.0 * static_cast<double>(opt.max_terms)))
            throw EvaluationError("wpd eta: multiplier stays above " + std::to_string(opt.epsilon) + " until k ~ " +
                                  std::to_string(std::exp(log_k_star)) + ", beyond the budget of " +
                                  std::to_string(opt.max_terms) + " terms");
    }

    std::size_t k = 0;
    double lt = log_term(p, 0.0);
    if (lt == kNegInf) {
        k = 1;
        lt = log_term(p, 1.0);
    }
    double ref = lt;
    double scaled = 0.0;  // sum of exp(log t_j - ref)
    double prev_lr = std::numeric_limits<double>::infinity();
    std::size_t dec_run = 0, inc_run = 0;

    for (; k < opt.max_terms; ++k) {
        if (lt > ref) {
            scaled *= std::exp(ref - lt);
            ref = lt;
        }
        scaled += std::exp(lt - ref);

        const double kd = static_cast<double>(k);
        const double lr = log_multiplier(p, kd);
        const bool resync = (k + 1) % kResync == 0 || (p.beta_zero_limit && k == 0);
        const double lt_next = resync ? log_term(p, kd + 1.0) : lt + lr;

        dec_run = lr <= prev_lr + 1e-14 * std::abs(prev_lr) ? dec_run + 1 : 0;
        inc_run = lr >= prev_lr - 1e-14 * std::abs(prev_lr) ? inc_run + 1 : 0;
        prev_lr = lr;

        const bool certified = dec_run >= kWindow || (inc_run >= kWindow && r_inf > 0.0);
        if (certified) {
            const double eps = dec_run >= kWindow ? std::exp(lr) : std::max(std::exp(lr), r_inf);
            if (eps <= opt.epsilon) {
                const double log_sum = ref + std::log(scaled);
                const double log_bound = lt_next - std::log1p(-eps);
                if (log_bound <= log_sum + std::log(opt.rel_tol)) {
                    EtaValue e;
                    e.log_value = log_sum;
                    e.value = std::exp(log_sum);
                    e.k_trunc = k;
                    e.log_remainder_bound = log_bound;
                    e.remainder_bound = std::exp(log_bound);
                    return e;
                }
            }
        }
        lt = lt_next;
    }
    throw EvaluationError("wpd eta: truncation not certified within " + std::to_string(opt.max_terms) +
                          " terms (lambda=" + std::to_string(p.lambda) + ", nu=" + std::to_string(p.nu) + ")");
}

double wpd_log_pmf(const WpdParams& p, std::uint64_t x, const EtaValue& normalizer) {
    return log_term(p, static_cast<double>(x)) - normalizer.log_value;
}

double wpd_pmf(const WpdParams& p, std::uint64_t x) { return std::exp(wpd_log_pmf(p, x, eta(p))); }

std::vector<double> wpd_pmf_recursive(const WpdParams& p, std::size_t x_max) {
    switch (p.tag) {
        case SpecialCase::poisson:
        case SpecialCase::com_poisson:
        case SpecialCase::hyper_poisson:
        case SpecialCase::model_I:
        case SpecialCase::model_I_2param:
        case SpecialCase::model_II:
        case SpecialCase::model_II_2param: break;
        default:
            throw DomainError("wpd_pmf_recursive: no recursion for tag " + std::string(tag_name(p.tag)));
    }
    const EtaValue e = eta(p);
    std::vector<double> out(x_max + 1, 0.0);
    // P(x+1) = lambda (x + gamma) / ((x + 1)(x + beta)^nu) P(x)
    std::size_t start = 0;
    double lp = wpd_log_pmf(p, 0, e);
    if (lp == kNegInf) {
        start = 1;
        if (x_max == 0) return out;
        lp = wpd_log_pmf(p, 1, e);
    }
    const double ll = std::log(p.lambda);
    for (std::size_t x = start; x <= x_max; ++x) {
        out[x] = std::exp(lp);
        const double xd = static_cast<double>(x);
        if (p.beta_zero_limit && x == 0) lp = wpd_log_pmf(p, 1, e);
        else lp += ll + std::log(xd + p.gamma) - std::log(xd + 1.0) - p.nu * std::log(xd + p.beta);
    }
    return out;
}

countdist::FactorialMomentSequence wpd_factorial_moments(const WpdParams& p, std::size_t R) {
    countdist::FactorialMomentSequence a(R + 1);
    a[0] = 1.0;
    const double base = eta(p).log_value;
    for (std::size_t r = 1; r <= R; ++r) {
        const double rd = static_cast<double>(r);
        WpdParams shifted{p.alpha, p.alpha * rd + p.beta, p.gamma + rd, p.nu, p.lambda, SpecialCase::general, false};
        const double l = rd * std::log(p.lambda) + eta(shifted).log_value - base;
        if (l > 709.0) throw EvaluationError("wpd_factorial_moments: a_" + std::to_string(r) + " overflows");
        a[r] = std::exp(l);
    }
    return a;
}

std::string_view dispersion_name(Dispersion d) {
    switch (d) {
        case Dispersion::overdispersed: return "overdispersed";
        case Dispersion::underdispersed: return "underdispersed";
        case Dispersion::equidispersed: return "equidispersed";
        case Dispersion::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

Dispersion dispersion_classify(const WpdParams& p) {
    // nu against R(y) = psi'(y + gamma) / (alpha^2 psi'(alpha y + beta)) over
    // y in [0, 50] step 0.1, plus far points standing in for the y -> inf tail.
    if (p.alpha == 0.0) return p.nu >= 0.0 ? Dispersion::overdispersed : Dispersion::indeterminate;
    const double gamma = p.beta_zero_limit ? 0.0 : p.gamma;
    std::vector<double> ys;
    for (int i = 0; i <= 500; ++i) ys.push_back(0.1 * i);
    for (double y : {1e2, 1e3, 1e4, 1e5, 1e6}) ys.push_back(y);

    bool all_equal = true, all_below = true, all_above = true;
    for (double y : ys) {
        if (y + gamma <= 0.0 || p.alpha * y + p.beta <= 0.0) continue;  // beta = 0 limit at y = 0
        const double ratio = trigamma(y + gamma) / (p.alpha * p.alpha * trigamma(p.alpha * y + p.beta));
        const double tol = 1e-12 * std::max(1.0, p.nu);
        const double d = p.nu - ratio;
        if (std::abs(d) > tol) all_equal = false;
        if (!(d < -tol)) all_below = false;
        if (!(d > tol)) all_above = false;
    }
    if (all_equal) return Dispersion::equidispersed;
    if (all_below) return Dispersion::overdispersed;
    if (all_above) return Dispersion::underdispersed;
    return Dispersion::indeterminate;
}

LogWeightFn log_weight_fn(const WpdParams& p) {
    return [p](std::uint64_t k) { return log_weight(p, k); };
}

Dispersion turan_check(const LogWeightFn& log_w, double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("turan_check: lambda must be positive");
    // log T^j f(lambda) = log sum_k lambda^k w(k + j) / k!, j = 0, 1, 2
    const double ll = std::log(lambda);
    std::array<double, 3> lf = {kNegInf, kNegInf, kNegInf};
    std::array<std::size_t, 3> quiet = {0, 0, 0};
    constexpr std::size_t kMax = 10'000'000;
    for (std::size_t k = 0; k < kMax; ++k) {
        const double kd = static_cast<double>(k);
        const double base = kd * ll - lgam(kd + 1.0);
        bool all_quiet = true;
        for (int j = 0; j < 3; ++j) {
            const double t = base + log_w(k + j);
            if (std::isnan(t) || t == std::numeric_limits<double>::infinity())
                throw EvaluationError("turan_check: weight not evaluable at k=" + std::to_string(k + j));
            quiet[j] = (k > 2 && t < lf[j] - 45.0) ? quiet[j] + 1 : 0;
            lf[j] = log_add(lf[j], t);
            if (quiet[j] < 20) all_quiet = false;
        }
        if (all_quiet) {
            const double d = lf[0] + lf[2] - 2.0 * lf[1];
            if (std::abs(d) <= 1e-10) return Dispersion::equidispersed;
            return d > 0.0 ? Dispersion::overdispersed : Dispersion::underdispersed;
        }
    }
    throw EvaluationError("turan_check: shifted series did not settle");
}

Dispersion sufficient_condition_check(const LogWeightFn& log_w, std::size_t K) {
    // sum_{j=0}^{k+1} [C(k,j) - C(k,j-1)] w(j) w(k-j+2), evaluated relative to its largest term
    bool all_pos = true, all_neg = true;
    for (std::size_t k = 0; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        std::vector<double> logs, signs;
        for (std::size_t j = 0; j <= k + 1; ++j) {
            const double jd = static_cast<double>(j);
            const double c1 = j <= k ? std::exp(lgam(kd + 1) - lgam(jd + 1) - lgam(kd - jd + 1)) : 0.0;
            const double c0 = j >= 1 ? std::exp(lgam(kd + 1) - lgam(jd) - lgam(kd - jd + 2)) : 0.0;
            const double c = c1 - c0;
            const double lw = log_w(j) + log_w(k - j + 2);
            if (c == 0.0 || lw == kNegInf) continue;
            logs.push_back(std::log(std::abs(c)) + lw);
            signs.push_back(c > 0 ? 1.0 : -1.0);
        }
        double sum = 0.0, abs_sum = 0.0;
        if (!logs.empty()) {
            const double m = *std::max_element(logs.begin(), logs.end());
            for (std::size_t i = 0; i < logs.size(); ++i) {
                const double v = std::exp(logs[i] - m);
                sum += signs[i] * v;
                abs_sum += v;
            }
        }
        const double tol = 1e-12 * abs_sum;
        if (!(sum > tol)) all_pos = false;
        if (!(sum < -tol)) all_neg = false;
    }
    if (all_pos) return Dispersion::overdispersed;
    if (all_neg) return Dispersion::underdispersed;
    return Dispersion::indeterminate;
}

}  // namespace countkit::wpd
