#include "countkit/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "countkit/error.hpp"
#include "detail/math.hpp"

namespace countkit::baselines {

using detail::lgam;

NegBinomParams NegBinomParams::make(double r, double p) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("negbinom: size r must be positive");
    if (!(p > 0.0 && p < 1.0)) throw DomainError("negbinom: p must lie in (0, 1)");
    return {r, p};
}

NegBinomParams NegBinomParams::from_size_mean(double size, double mean) {
    if (!(mean > 0.0) || !std::isfinite(mean)) throw DomainError("negbinom: mean must be positive");
    return make(size, size / (size + mean));
}

double negbinom_log_pmf(const NegBinomParams& p, std::uint64_t x) {
    const double xd = static_cast<double>(x);
    const double lx = x == 0 ? 0.0 : xd * std::log1p(-p.p);
    return lgam(p.r + xd) - lgam(p.r) - lgam(xd + 1.0) + p.r * std::log(p.p) + lx;
}

double negbinom_pmf(const NegBinomParams& p, std::uint64_t x) { return std::exp(negbinom_log_pmf(p, x)); }

GenPoissonParams GenPoissonParams::make(double lambda1, double lambda2) {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw DomainError("genpoisson: lambda1 must be positive");
    if (!(lambda2 < 1.0) || !(lambda2 >= -1.0)) throw DomainError("genpoisson: lambda2 must lie in [-1, 1)");
    GenPoissonParams g{lambda1, lambda2, 0};
    if (lambda2 < 0.0) {
        // largest M with lambda1 + M lambda2 > 0
        double m = std::ceil(lambda1 / -lambda2) - 1.0;
        if (lambda1 + (m + 1.0) * lambda2 > 0.0) m += 1.0;
        if (m < 1.0) throw DomainError("genpoisson: lambda1 + lambda2 must be positive");
        g.M = static_cast<std::uint64_t>(m);
        if (lambda2 < std::max(-1.0, -lambda1 / m)) throw DomainError("genpoisson: lambda2 below max(-1, -lambda1/M)");
    }
    return g;
}

double genpoisson_log_pmf(const GenPoissonParams& p, std::uint64_t x) {
    if (p.lambda2 < 0.0 && x > p.M) return -std::numeric_limits<double>::infinity();
    const double xd = static_cast<double>(x);
    const double m = p.lambda1 + p.lambda2 * xd;
    return std::log(p.lambda1) + (xd - 1.0) * std::log(m) - m - lgam(xd + 1.0);
}

double genpoisson_pmf(const GenPoissonParams& p, std::uint64_t x) { return std::exp(genpoisson_log_pmf(p, x)); }

countdist::FactorialMomentSequence genpoisson_factorial_moments(const GenPoissonParams& p, std::size_t K) {
    countdist::FactorialMomentSequence a(K + 1, 0.0);
    a[0] = 1.0;
    // log of the r-th term of a_k: lambda1 (lambda1 + lambda2 (r+k))^{r+k-1} e^{-(lambda1 + lambda2 (r+k))} / r!
    auto log_term = [&](double r, double k) {
        const double m = p.lambda1 + p.lambda2 * (r + k);
        return std::log(p.lambda1) + (r + k - 1.0) * std::log(m) - m - lgam(r + 1.0);
    };
    for (std::size_t k = 1; k <= K; ++k) {
        const double kd = static_cast<double>(k);
        if (p.lambda2 < 0.0) {
            if (k > p.M) break;
            double s = 0.0;
            for (std::uint64_t r = 0; r + k <= p.M; ++r) s += std::exp(log_term(static_cast<double>(r), kd));
            a[k] = s;
            continue;
        }
        // Term ratios tend to q = lambda2 e^{1 - lambda2} < 1; once they have moved
        // monotonically for a window, the tail after r is below t_{r+1} / (1 - max(ratio, q)).
        const double q_inf = p.lambda2 * std::exp(1.0 - p.lambda2);
        constexpr std::size_t kWindow = 8;
        constexpr std::size_t kMaxTerms = 10'000'000;
        double s = 0.0, comp = 0.0;
        double lt = log_term(0.0, kd);
        double prev_lr = std::numeric_limits<double>::quiet_NaN();
        std::size_t dec = 0, inc = 0;
        bool done = false;
        for (std::size_t r = 0; r < kMaxTerms; ++r) {
            const double v = std::exp(lt);
            const double t = s + v;
            comp += std::abs(s) >= v ? (s - t) + v : (v - t) + s;
            s = t;
            const double lt_next = log_term(static_cast<double>(r + 1), kd);
            const double lr = lt_next - lt;
            dec = lr <= prev_lr ? dec + 1 : 0;
            inc = lr >= prev_lr ? inc + 1 : 0;
            prev_lr = lr;
            if (dec >= kWindow || inc >= kWindow) {
                const double q = std::max(std::exp(lr), q_inf);
                if (q < 1.0 && lt_next - std::log1p(-q) <= std::log(s + comp) + std::log(1e-17)) {
                    done = true;
                    break;
                }
            }
            lt = lt_next;
        }
        if (!done) throw EvaluationError("genpoisson_factorial_moments: series for a_" + std::to_string(k) +
                                         " did not converge");
        a[k] = s + comp;
    }
    return a;
}
}  // namespace countkit::baselines
