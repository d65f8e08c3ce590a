#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "countkit/baselines.hpp"
#include "countkit/countdist.hpp"
#include "countkit/error.hpp"

using namespace countkit;
using namespace countkit::baselines;

namespace {

template <class F>
std::vector<double> moments_by_sum(F pmf, std::size_t x_max) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (std::uint64_t x = 0; x <= x_max; ++x) {
        const double q = pmf(x), d = double(x);
        s0 += q;
        s1 += d * q;
        s2 += d * d * q;
        s3 += d * d * d * q;
    }
    return {s0, s1, s2, s3};
}

}  // namespace

TEST(NegBinom, Examples) {
    const auto p = NegBinomParams::make(2.5, 0.3);
    EXPECT_NEAR(negbinom_pmf(p, 0), std::pow(0.3, 2.5), 1e-15);
    const auto g = NegBinomParams::make(1.0, 0.4);
    for (std::uint64_t x = 0; x < 10; ++x) EXPECT_NEAR(negbinom_pmf(g, x), 0.4 * std::pow(0.6, double(x)), 1e-15);
    EXPECT_NEAR(negbinom_pmf(NegBinomParams::make(2, 0.5), 2), 0.1875, 1e-15);
    EXPECT_NEAR(std::exp(negbinom_log_pmf(p, 7)), negbinom_pmf(p, 7), 1e-15);
}

TEST(NegBinom, MomentsAndSkewness) {
    for (double r : {0.5, 2.0, 7.0})
        for (double pr : {0.2, 0.5, 0.8}) {
            const auto p = NegBinomParams::make(r, pr);
            const auto m = moments_by_sum([&](std::uint64_t x) { return negbinom_pmf(p, x); }, 3000);
            EXPECT_NEAR(m[0], 1.0, 1e-8);
            EXPECT_NEAR(m[1], p.mean(), 1e-8 * p.mean() + 1e-12);
            const double var = m[2] - m[1] * m[1];
            EXPECT_NEAR(var, p.mean() / pr, 1e-7 * var);
            const double third = m[3] - 3 * m[1] * m[2] + 2 * m[1] * m[1] * m[1];
            EXPECT_GT(third, 0.0);
        }
    const auto q = NegBinomParams::from_size_mean(3.0, 4.5);
    EXPECT_NEAR(q.mean(), 4.5, 1e-12);
    EXPECT_THROW(NegBinomParams::make(0.0, 0.5), DomainError);
    EXPECT_THROW(NegBinomParams::make(1.0, 1.0), DomainError);
}

TEST(GenPoisson, PmfExamples) {
    EXPECT_NEAR(genpoisson_pmf(GenPoissonParams::make(2.0, 0.0), 0), std::exp(-2.0), 1e-15);
    const auto p = GenPoissonParams::make(1.0, 0.2);
    const auto m = moments_by_sum([&](std::uint64_t x) { return genpoisson_pmf(p, x); }, 2000);
    EXPECT_NEAR(m[0], 1.0, 1e-8);
    // known mean lambda1 / (1 - lambda2), variance lambda1 / (1 - lambda2)^3
    EXPECT_NEAR(m[1], 1.25, 1e-8);
    EXPECT_NEAR(m[2] - m[1] * m[1], 1.0 / std::pow(0.8, 3), 1e-7);

    const auto fish = GenPoissonParams::make(0.6334, 0.5430);
    const auto f = moments_by_sum([&](std::uint64_t x) { return genpoisson_pmf(fish, x); }, 20000);
    EXPECT_GT((f[2] - f[1] * f[1]) / f[1], 1.0);
}

TEST(GenPoisson, NegativeLambda2Truncates) {
    const auto p = GenPoissonParams::make(2.0, -0.3);
    EXPECT_EQ(p.M, 6u);  // 2 - 0.3 * 6 = 0.2 > 0, 2 - 0.3 * 7 < 0
    EXPECT_EQ(genpoisson_pmf(p, 7), 0.0);
    EXPECT_GT(genpoisson_pmf(p, 6), 0.0);
    EXPECT_EQ(genpoisson_log_pmf(p, 8), -INFINITY);
    EXPECT_THROW(GenPoissonParams::make(1.0, -1.5), DomainError);
    EXPECT_THROW(GenPoissonParams::make(0.0, 0.1), DomainError);
}

TEST(GenPoisson, FactorialMomentsMatchPmf) {
    for (double l2 : {-0.1, 0.0, 0.2}) {
        const auto p = GenPoissonParams::make(1.5, l2);
        const auto a = genpoisson_factorial_moments(p, 3);
        EXPECT_EQ(a[0], 1.0);
        std::vector<double> b(4, 0.0);
        for (std::uint64_t x = 0; x <= 3000; ++x) {
            const double q = genpoisson_pmf(p, x);
            double f = 1.0;
            for (std::size_t k = 0; k <= 3; ++k) {
                b[k] += f * q;
                f *= double(x) - double(k);
            }
        }
        for (std::size_t k = 0; k <= 3; ++k) EXPECT_NEAR(a[k], b[k], 1e-6 * b[k]) << "l2=" << l2 << " k=" << k;
    }
    const auto poi = genpoisson_factorial_moments(GenPoissonParams::make(1.7, 0.0), 4);
    EXPECT_NEAR(poi[4], std::pow(1.7, 4), 1e-12);

    const auto q = GenPoissonParams::make(1.0, 0.1);
    const auto a = genpoisson_factorial_moments(q, 60);
    EXPECT_NEAR(countdist::pmf_from_factorial(a, 1), genpoisson_pmf(q, 1), 1e-6);

    const auto neg = genpoisson_factorial_moments(GenPoissonParams::make(2.0, -0.3), 9);
    EXPECT_EQ(neg[7], 0.0);
    EXPECT_EQ(neg[9], 0.0);
}
