#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <vector>

#include "countkit/countdist.hpp"
#include "countkit/sampling.hpp"
#include "countkit/specfun.hpp"
#include "countkit/wpd.hpp"

using namespace countkit;
using namespace countkit::sampling;

namespace {

double total_variation(const std::vector<std::uint64_t>& v, const std::vector<double>& pmf) {
    std::map<std::uint64_t, double> freq;
    for (auto x : v) freq[x] += 1.0 / double(v.size());
    double tv = 0.0;
    for (std::size_t x = 0; x < pmf.size(); ++x) tv += std::abs((freq.count(x) ? freq[x] : 0.0) - pmf[x]);
    for (const auto& [x, f] : freq)
        if (x >= pmf.size()) tv += f;
    return 0.5 * tv;
}

struct Stats {
    double mean, var;
};

Stats stats(const std::vector<std::uint64_t>& v) {
    double m = 0, s = 0;
    for (auto x : v) m += double(x);
    m /= double(v.size());
    for (auto x : v) s += (double(x) - m) * (double(x) - m);
    return {m, s / double(v.size())};
}

}  // namespace

TEST(Rng, OpenIntervalAndDeterminism) {
    RngStream a(42), b(42), c(42, 1);
    bool differs = false;
    for (int i = 0; i < 100000; ++i) {
        const double u = a.next_uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LT(u, 1.0);
        EXPECT_EQ(u, b.next_uniform());
        differs |= (u != c.next_uniform());
    }
    EXPECT_TRUE(differs);
}

TEST(Stable, AlphaOneIsDegenerate) {
    RngStream rng(1);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(sample_stable(1.0, rng), 1.0);
}

TEST(Stable, LaplaceTransform) {
    RngStream rng(2024);
    const std::size_t n = 200'000;
    for (double alpha : {0.3, 0.5, 0.7, 0.9}) {
        std::vector<double> s(n);
        for (auto& v : s) v = sample_stable(alpha, rng);
        for (double t : {0.5, 1.0, 2.0}) {
            double m = 0, m2 = 0;
            for (double v : s) {
                const double e = std::exp(-t * v);
                m += e;
                m2 += e * e;
            }
            m /= n;
            const double se = std::sqrt((m2 / n - m * m) / n);
            EXPECT_LT(std::abs(m - std::exp(-std::pow(t, alpha))), 4 * se) << alpha << " " << t;
        }
    }
}

TEST(MWright, SamplesMatchDensityMean) {
    // E[S^{-alpha}] = Gamma(2) / Gamma(1 + alpha) is the mean of M_alpha
    RngStream rng(3);
    const double alpha = 0.6;
    const std::size_t n = 200'000;
    double m = 0, m2 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double y = sample_mwright(alpha, rng);
        m += y;
        m2 += y * y;
    }
    m /= n;
    const double se = std::sqrt((m2 / n - m * m) / n);
    EXPECT_LT(std::abs(m - 1.0 / std::tgamma(1 + alpha)), 4 * se);
}

TEST(Fpd, AlphaOneIsPoisson) {
    for (double mu : {1.0, 5.0}) {
        RngStream rng(99);
        const auto b = sample_fpd(1.0, mu, 100'000, rng);
        std::map<std::uint64_t, double> obs;
        for (auto x : b.values) obs[x] += 1;
        // chi-square with cells pooled at expected >= 5 on the right
        double chi2 = 0.0, cum = 0.0;
        std::size_t cells = 0;
        std::uint64_t x = 0;
        for (;; ++x) {
            const double p = std::exp(x * std::log(mu) - mu - std::lgamma(x + 1.0));
            if ((1.0 - cum - p) * 1e5 < 5.0) break;
            const double e = p * 1e5, o = obs.count(x) ? obs[x] : 0.0;
            chi2 += (o - e) * (o - e) / e;
            cum += p;
            ++cells;
        }
        double o_tail = 0.0;
        for (const auto& [v, f] : obs)
            if (v >= x) o_tail += f;
        const double e_tail = (1.0 - cum) * 1e5;
        chi2 += (o_tail - e_tail) * (o_tail - e_tail) / e_tail;
        ++cells;
        EXPECT_GT(specfun::chi2_sf(chi2, double(cells - 1)), 0.01) << mu;
    }
}

TEST(Fpd, MeanAndTotalVariation) {
    RngStream rng(7);
    const auto b = sample_fpd(0.75, 3.0, 100'000, rng);
    EXPECT_EQ(b.n, b.values.size());
    const auto s = stats(b.values);
    EXPECT_LT(std::abs(s.mean - 3.0 / std::tgamma(1.75)), 3 * std::sqrt(s.var / b.n));
    const auto pmf = countdist::gfpd_pmf_support(countdist::GfpdParams::fpd(0.75, 3.0));
    EXPECT_LT(total_variation(b.values, pmf), 0.015);
}

TEST(Fpd, Determinism) {
    RngStream a(5), b(5);
    EXPECT_EQ(sample_fpd(0.6, 2.0, 1000, a).values, sample_fpd(0.6, 2.0, 1000, b).values);
}

TEST(Wpd, PoissonAndModelIDispersion) {
    RngStream rng(11);
    const auto poisson = sample_wpd(wpd::WpdParams::make(1, 1, 1, 1, 2.0), 100'000, rng);
    const auto s = stats(poisson.values);
    EXPECT_LT(std::abs(s.mean - 2.0), 3 * std::sqrt(2.0 / 100'000));

    wpd::FreeParams over;
    over.beta = 0.5;
    over.nu = 0.1;
    over.lambda = 1.0;
    const auto so = stats(sample_wpd(wpd::make_special_case(wpd::SpecialCase::model_I, over), 100'000, rng).values);
    EXPECT_GT(so.var / so.mean, 1.0);

    wpd::FreeParams under;
    under.beta = 0.1;
    under.nu = 1.1;
    under.lambda = 5.0;
    const auto su = stats(sample_wpd(wpd::make_special_case(wpd::SpecialCase::model_I, under), 100'000, rng).values);
    EXPECT_LT(su.var / su.mean, 1.0);
}

TEST(Wpd, EmpiricalPmfConverges) {
    RngStream rng(12);
    for (const auto& p : {wpd::WpdParams::make(1, 1, 1, 1.5, 2.0), wpd::WpdParams::make(0.6, 1.2, 0.7, 1.4, 2.0),
                          wpd::WpdParams::make(1, 1.5, 0.8, 1, 2.0)}) {
        const auto b = sample_wpd(p, 100'000, rng);
        std::vector<double> pmf;
        for (std::uint64_t x = 0; x < 200; ++x) pmf.push_back(wpd::wpd_pmf(p, x));
        EXPECT_LT(total_variation(b.values, pmf), 0.01);
    }
}

TEST(McMoment, Examples) {
    RngStream rng(13);
    EXPECT_EQ(mc_moment(0.5, 1.0, 0, 10, rng).value, 1.0);
    const auto m1 = mc_moment(1.0, 3.0, 1, 100'000, rng);
    EXPECT_LT(std::abs(m1.value - 3.0), 3 * m1.std_error);
    const auto a = countdist::gfpd_factorial_moments(countdist::GfpdParams::fpd(0.5, 1.0), 2);
    const auto m2 = mc_moment(0.5, 1.0, 2, 200'000, rng);
    EXPECT_LT(std::abs(m2.value - countdist::moments_from_factorial(a, 2)), 3 * m2.std_error);
}
