#pragma once

#include <cstddef>
#include <cstdint>

#include "countkit/countdist.hpp"

namespace countkit::baselines {

// Extended negative binomial: Gamma(r + x) / (Gamma(r) x!) p^r (1 - p)^x.
struct NegBinomParams {
    double r = 1.0;
    double p = 0.5;

    static NegBinomParams make(double r, double p);
    // mean = r (1 - p) / p
    static NegBinomParams from_size_mean(double size, double mean);
    double mean() const { return r * (1.0 - p) / p; }
};

double negbinom_pmf(const NegBinomParams& p, std::uint64_t x);
double negbinom_log_pmf(const NegBinomParams& p, std::uint64_t x);

// Consul's generalized Poisson. For lambda2 < 0 the support stops at M, the
// largest integer with lambda1 + M lambda2 > 0.
struct GenPoissonParams {
    double lambda1 = 1.0;
    double lambda2 = 0.0;
    std::uint64_t M = 0;  // 0 when lambda2 >= 0 (unbounded support)

    static GenPoissonParams make(double lambda1, double lambda2);
};

double genpoisson_pmf(const GenPoissonParams& p, std::uint64_t x);
double genpoisson_log_pmf(const GenPoissonParams& p, std::uint64_t x);

// a[0..K]; for lambda2 < 0, a_k = 0 once k > M.
countdist::FactorialMomentSequence genpoisson_factorial_moments(const GenPoissonParams& p, std::size_t K);

}  // namespace countkit::baselines
