#include <quadmath.h>

#include <cmath>
#include <string>
#include <vector>

#include "countkit/error.hpp"
#include "countkit/wpd.hpp"

namespace countkit::wpd {

namespace {

using quad = __float128;

quad qabs(quad x) { return x < 0 ? -x : x; }

// log w(k) in quad precision; -inf for a zero weight.
quad log_weight_q(const WpdParams& p, std::size_t k) {
    const quad kq = static_cast<quad>(k);
    if (p.beta_zero_limit) {
        if (k == 0) return p.nu == 1.0 ? quad(0) : -HUGE_VALQ;
        return (quad(1) - quad(p.nu)) * lgammaq(kq);
    }
    quad l = lgammaq(kq + quad(p.gamma));
    if (p.nu != 0.0) l -= quad(p.nu) * lgammaq(quad(p.alpha) * kq + quad(p.beta));
    return l;
}

}  // namespace

countdist::FactorialMomentSequence wpd_factorial_moments_faa(const WpdParams& p, std::size_t R,
                                                             const FaaOptions& opt) {
    countdist::FactorialMomentSequence out(R + 1, 0.0);
    out[0] = 1.0;
    if (R == 0) return out;

    const std::size_t N = opt.max_terms;
    // A_{j,0} = w(j); A_{j,r} = A_{j+r,0}. Scaled by A_{0,0} so x_m = A_{m,0} / A_{0,0}.
    const quad la0 = log_weight_q(p, 0);
    if (isinfq(la0)) throw DomainError("wpd_factorial_moments_faa: w(0) = 0, 1/eta has no power series at 0");
    std::vector<quad> A(N + R + 1);
    for (std::size_t j = 0; j < A.size(); ++j) A[j] = expq(log_weight_q(p, j) - la0);
    if (!finiteq(A.back())) throw EvaluationError("wpd_factorial_moments_faa: weights overflow quad range");

    // Bell rows B[n][k](A_1, A_2, ...), built as needed. d_i = A00 D_i and its
    // absolute counterpart for the rounding estimate.
    std::vector<std::vector<quad>> B;
    std::vector<std::vector<quad>> binom;
    std::vector<quad> d, d_abs;
    std::vector<quad> fact(N + 2);
    fact[0] = 1;
    for (std::size_t i = 1; i < fact.size(); ++i) fact[i] = fact[i - 1] * quad(static_cast<double>(i));

    auto extend = [&](std::size_t n) {
        binom.emplace_back(n + 1, quad(1));
        for (std::size_t i = 1; i < n; ++i) binom[n][i] = binom[n - 1][i - 1] + binom[n - 1][i];
        std::vector<quad> row(n + 1, quad(0));
        if (n == 0) {
            row[0] = 1;
        } else {
            for (std::size_t k = 1; k <= n; ++k) {
                quad acc = 0;
                for (std::size_t m = 1; m + k <= n + 1; ++m) acc += binom[n - 1][m - 1] * A[m] * B[n - m][k - 1];
                row[k] = acc;
            }
        }
        quad s = 0, sa = 0;
        for (std::size_t k = 0; k <= n; ++k) {
            const quad t = fact[k] * row[k];
            s += (k % 2 == 0) ? t : -t;
            sa += qabs(t);
        }
        B.push_back(std::move(row));
        d.push_back(s);
        d_abs.push_back(sa);
    };

    const quad lam = quad(p.lambda);
    const quad eps = quad(1) / (quad(1ULL << 56) * quad(1ULL << 56));  // 2^-112
    for (std::size_t r = 1; r <= R; ++r) {
        quad sum = 0, mag = 0, lam_pow = 1;  // lam_pow = lambda^j / j!
        std::size_t small_run = 0;
        bool done = false;
        for (std::size_t j = 0; j < N; ++j) {
            if (d.size() <= j) extend(j);
            quad c = 0, ca = 0;
            for (std::size_t i = 0; i <= j; ++i) {
                const quad t = binom[j][i] * A[j - i + r];
                c += t * d[i];
                ca += t * d_abs[i];
            }
            c *= lam_pow;
            ca *= lam_pow;
            sum += c;
            mag += ca;
            small_run = (qabs(c) <= quad(1e-20) * qabs(sum)) ? small_run + 1 : 0;
            lam_pow *= lam / quad(static_cast<double>(j + 1));
            if (small_run >= 5) {
                done = true;
                break;
            }
        }
        if (!done)
            throw EvaluationError("wpd_factorial_moments_faa: series for a_" + std::to_string(r) +
                                  " not converged within " + std::to_string(N) + " terms");
        const quad rel_err = quad(4 * N) * eps * mag / qabs(sum);
        if (!(rel_err <= quad(opt.max_rel_error)))
            throw EvaluationError("wpd_factorial_moments_faa: cancellation too severe for a_" + std::to_string(r) +
                                  " (estimated relative error " + std::to_string(static_cast<double>(rel_err)) + ")");
        // a_r = lambda^r / A00 * sum, with A_{j,r} scaled by A00 as well
        const quad a = expq(quad(static_cast<double>(r)) * logq(lam)) * sum;
        out[r] = static_cast<double>(a);
    }
    return out;
}

}  // namespace countkit::wpd
