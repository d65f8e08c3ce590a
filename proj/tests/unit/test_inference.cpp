#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "countkit/countdist.hpp"
#include "countkit/error.hpp"
#include "countkit/inference.hpp"
#include "countkit/sampling.hpp"
#include "countkit/specfun.hpp"
#include "countkit/wpd.hpp"

using namespace countkit;
using namespace countkit::inference;

namespace {

CountData poisson_data(double mu, std::size_t n, std::uint64_t seed) {
    sampling::RngStream rng(seed);
    return CountData::from_values(sampling::sample_fpd(1.0, mu, n, rng).values);
}

}  // namespace

TEST(CountData, Construction) {
    const std::vector<std::uint64_t> v = {0, 1, 1, 3};
    const auto d = CountData::from_values(v);
    EXPECT_EQ(d.n_total, 4u);
    EXPECT_EQ(d.histogram.at(1), 2u);
    EXPECT_EQ(d.max_value(), 3u);
    EXPECT_DOUBLE_EQ(d.mean(), 1.25);
    EXPECT_DOUBLE_EQ(d.variance(), (1.5625 + 0.0625 * 2 + 3.0625) / 4);
    const auto h = CountData::from_histogram({{0, 1}, {2, 5}, {4, 0}});
    EXPECT_EQ(h.n_total, 6u);
    EXPECT_EQ(h.histogram.count(4), 0u);
}

TEST(Loglik, Examples) {
    const auto d = CountData::from_histogram({{0, 1}});
    EXPECT_NEAR(loglik({"poisson", {2.0}}, d), -2.0, 1e-14);
    const auto g = CountData::from_histogram({{7, 1}});
    EXPECT_EQ(loglik({"genpoisson", {2.0, -0.3}}, g), -INFINITY);
    EXPECT_THROW(loglik({"poisson", {-1.0}}, d), DomainError);
    EXPECT_THROW(loglik({"nope", {1.0}}, d), DomainError);
}

TEST(Loglik, FpdAtAlphaOneMaximizedAtMean) {
    const auto d = poisson_data(3.0, 2000, 1);
    const double m = d.mean();
    const double at = loglik({"fpd", {1.0, m}}, d);
    EXPECT_GT(at, loglik({"fpd", {1.0, m * 1.01}}, d));
    EXPECT_GT(at, loglik({"fpd", {1.0, m * 0.99}}, d));
}

TEST(Registry, ParamsAndBounds) {
    for (const auto& id : model_ids()) {
        EXPECT_TRUE(is_model_id(id));
        EXPECT_EQ(param_names(id).size(), n_free_params(id));
        const auto b = param_bounds(id);
        EXPECT_EQ(b.lower.size(), n_free_params(id));
        EXPECT_NO_THROW(validate({id, default_init(id, poisson_data(2.0, 500, 2))})) << id;
    }
    EXPECT_FALSE(is_model_id("bogus"));
}

TEST(Gof, PerfectFitAndPoolingTotals) {
    const auto d = poisson_data(4.0, 5000, 3);
    const auto r = gof_chisq({"poisson", {4.0}}, d);
    EXPECT_EQ(r.df, r.observed.size() - 2);
    EXPECT_NEAR(std::accumulate(r.expected.begin(), r.expected.end(), 0.0), 5000.0, 1e-9);
    EXPECT_NEAR(std::accumulate(r.observed.begin(), r.observed.end(), 0.0), 5000.0, 1e-9);
    for (double e : r.expected) EXPECT_GE(e, 5.0);
    EXPECT_NEAR(r.p_value, specfun::chi2_sf(r.chi2, double(r.df)), 1e-15);

    // observed counts proportional to a geometric pmf give chi2 = 0
    std::map<std::uint64_t, std::uint64_t> h;
    for (std::uint64_t x = 0; x < 12; ++x) h[x] = std::uint64_t(1) << (11 - x);
    const auto g = CountData::from_histogram(h);
    const auto model = Model{"fpd", {0.0, 1.0}};
    const auto exact = gof_chisq(model, g, {false, 0.0});
    EXPECT_GT(exact.p_value, 0.99);
}

TEST(Gof, TooFewCells) {
    const auto d = CountData::from_histogram({{0, 3}, {1, 2}});
    EXPECT_THROW(gof_chisq({"negbinom", {2.0, 1.0}}, d), DomainError);
}

TEST(Gof, MisspecifiedFpdRejected) {
    const auto d = poisson_data(3.0, 10'000, 4);
    Grid grid;
    for (int j = 0; j <= 40; ++j) grid.push_back({0.3, d.mean() * std::tgamma(1.3) * (0.6 + 0.02 * j)});
    const auto fit = fit_grid("fpd", d, grid);
    EXPECT_LT(fit.p_value, 0.01);
}

TEST(FitGrid, SinglePointAndTies) {
    const auto d = poisson_data(2.0, 300, 5);
    const auto one = fit_grid("poisson", d, {{1.7}});
    EXPECT_TRUE(one.converged);
    EXPECT_EQ(one.params, std::vector<double>{1.7});
    const auto tie = fit_grid("fpd", d, {{0.5, 2.0}, {0.5, 2.0}, {0.2, 1.0}});
    EXPECT_EQ(tie.evaluations, 3u);
    EXPECT_THROW(fit_grid("poisson", d, {}), DomainError);
}

TEST(FitGrid, RecoversFpd) {
    sampling::RngStream rng(6);
    const auto d = CountData::from_values(sampling::sample_fpd(0.85, 3.6, 5000, rng).values);
    const auto a = fit_grid("fpd", d, default_grid("fpd", d));
    const auto b = fit_grid("fpd", d, default_grid("fpd", d));
    EXPECT_NEAR(a.params[0], 0.85, 0.05);
    EXPECT_NEAR(a.params[1], 3.6, 0.05 * 3.6);
    EXPECT_EQ(a.params, b.params);
    EXPECT_EQ(a.loglik, b.loglik);
    EXPECT_EQ(a.df, b.df);
}

TEST(FitGrid, PoissonDataHitsAlphaBoundary) {
    const auto d = poisson_data(3.0, 5000, 8);
    EXPECT_GE(fit_grid("fpd", d, default_grid("fpd", d)).params[0], 0.97);
}

TEST(FitSimplex, PoissonMle) {
    const auto d = poisson_data(2.5, 3000, 9);
    for (double init : {0.3, 2.0, 10.0}) {
        const auto f = fit_simplex("poisson", d, {init});
        EXPECT_TRUE(f.converged);
        EXPECT_NEAR(f.params[0], d.mean(), 1e-4);
    }
    EXPECT_THROW(fit_simplex("poisson", d, {-1.0}), DomainError);
}

TEST(FitSimplex, ComPoissonUnderdispersion) {
    sampling::RngStream rng(10);
    const auto d = CountData::from_values(sampling::sample_wpd(wpd::WpdParams::make(1, 1, 1, 2, 5), 5000, rng).values);
    const auto f = fit_simplex("com_poisson", d, default_init("com_poisson", d));
    const auto names = f.param_names;
    const auto nu = std::find(names.begin(), names.end(), "nu") - names.begin();
    EXPECT_GT(f.params[nu], 1.0);
    const auto b = param_bounds("com_poisson");
    for (std::size_t i = 0; i < f.params.size(); ++i) {
        EXPECT_GE(f.params[i], b.lower[i]);
        EXPECT_LE(f.params[i], b.upper[i]);
    }
    const auto g = gof_chisq({"com_poisson", f.params}, d);
    EXPECT_EQ(f.df, g.observed.size() - 1 - 2);
    EXPECT_DOUBLE_EQ(f.chi2, g.chi2);
}

TEST(FitSimplex, ModelIRefitNotWorseThanTruth) {
    wpd::FreeParams f;
    f.beta = 0.5;
    f.nu = 0.1;
    f.lambda = 1.0;
    const auto truth = wpd::make_special_case(wpd::SpecialCase::model_I, f);
    sampling::RngStream rng(14);
    const auto d = CountData::from_values(sampling::sample_wpd(truth, 5000, rng).values);
    const auto fit = fit_default("model_I", d);
    EXPECT_GE(fit.loglik, loglik({"model_I", wpd::free_vector(truth)}, d) - 2.0);
}

TEST(Compare, RanksAndOrderInvariance) {
    sampling::RngStream rng(15);
    const auto d = CountData::from_values(sampling::sample_fpd(0.85, 3.6, 3000, rng).values);
    const auto rows = compare({"negbinom", "fpd", "poisson"}, d);
    ASSERT_EQ(rows.size(), 3u);
    for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_GE(rows[i - 1].fit.p_value, rows[i].fit.p_value);
    auto pos = [&](const std::vector<CompareRow>& r, const std::string& id) {
        return std::find_if(r.begin(), r.end(), [&](const CompareRow& c) { return c.fit.model_id == id; }) - r.begin();
    };
    EXPECT_LT(pos(rows, "fpd"), pos(rows, "negbinom"));
    const auto again = compare({"poisson", "fpd", "negbinom"}, d);
    for (std::size_t i = 0; i < rows.size(); ++i) EXPECT_EQ(rows[i].fit.model_id, again[i].fit.model_id);
    EXPECT_THROW(compare({"fpd"}, d), DomainError);
}
