#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace countkit::sampling {
class RngStream;
}

namespace countkit::countdist {

// gfPd(alpha, beta, delta, mu). The fractional Poisson law is beta = delta = 1.
struct GfpdParams {
    double alpha = 1.0;
    double beta = 1.0;
    double delta = 1.0;
    double mu = 1.0;
    bool geometric_limit = false;  // fPd at alpha = 0: geometric with mean mu

    // Validates alpha, beta in (0,1], 0 < delta <= beta/alpha, mu > 0.
    static GfpdParams make(double alpha, double beta, double delta, double mu);
    static GfpdParams fpd(double alpha, double mu);
    static GfpdParams fpd_geometric_limit(double mu);
    static GfpdParams aa1(double alpha, double mu);

    bool is_fpd() const { return beta == 1.0 && delta == 1.0; }
};

// a[0..K] with a[0] = 1.
using FactorialMomentSequence = std::vector<double>;

struct SummaryStats {
    double mean = 0.0;
    double variance = 0.0;
    double skewness = 0.0;
    double fisher_index = 0.0;
};

struct McEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;  // samples drawn; 0 for deterministic paths
};

double gfpd_pmf(const GfpdParams& p, std::uint64_t x);

// pmf at x = 0..x_max, computed together.
std::vector<double> gfpd_pmf_table(const GfpdParams& p, std::size_t x_max);

// Smallest table length covering the support up to pmf < 1e-14 for ten consecutive x.
std::vector<double> gfpd_pmf_support(const GfpdParams& p, std::size_t x_cap = 1'000'000);

McEstimate gfpd_pmf_mc(const GfpdParams& p, std::uint64_t x, std::size_t n, sampling::RngStream& rng);

enum class CdfMethod { pmf_sum, series };

struct CdfResult {
    double value = 0.0;          // pmf summation
    double series_value = 0.0;   // large-mu series, NaN when it did not converge
    bool series_flagged = false; // series unavailable or disagreeing beyond 1e-6
    CdfMethod method = CdfMethod::pmf_sum;
};

CdfResult fpd_cdf(double alpha, double mu, std::uint64_t x);

// The series in mu^{-(r+1)} alone; throws EvaluationError when optimal
// truncation cannot reach 1e-10.
double fpd_cdf_series(double alpha, double mu, std::uint64_t x);

FactorialMomentSequence gfpd_factorial_moments(const GfpdParams& p, std::size_t K);
double moments_from_factorial(const FactorialMomentSequence& a, std::size_t k);
double skewness_from_factorial(double a1, double a2, double a3);
SummaryStats gfpd_summary(const GfpdParams& p);

enum class SkewCase { fpd, aa1 };
double fpd_skewness_limit(double alpha, SkewCase which = SkewCase::fpd);

double overdispersion_delta_bound(double alpha, double beta);

// gfPd(alpha, alpha, 1, mu) pmf; falls back to the stable-expectation
// Monte Carlo estimate when the deterministic route refuses.
McEstimate gfpd_aa1_pmf(double alpha, double mu, std::uint64_t x, std::size_t n, sampling::RngStream& rng);

double pmf_from_factorial(const FactorialMomentSequence& a, std::uint64_t x);

}  // namespace countkit::countdist
