#include <benchmark/benchmark.h>

#include "countkit/countdist.hpp"
#include "countkit/inference.hpp"
#include "countkit/sampling.hpp"
#include "countkit/specfun.hpp"
#include "countkit/wpd.hpp"

using namespace countkit;

static void BM_PrabhakarSeries(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(specfun::prabhakar_ml(0.5, 1.0, 1.0, -4.0));
}
BENCHMARK(BM_PrabhakarSeries);

static void BM_PrabhakarContour(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(specfun::prabhakar_ml(0.9, 1.0, 1.0, -40.0));
}
BENCHMARK(BM_PrabhakarContour);

static void BM_FpdPmfScalar(benchmark::State& state) {
    const auto p = countdist::GfpdParams::fpd(0.9, 20.0);
    for (auto _ : state) benchmark::DoNotOptimize(countdist::gfpd_pmf(p, 22));
}
BENCHMARK(BM_FpdPmfScalar);

static void BM_FpdPmfTable(benchmark::State& state) {
    const auto p = countdist::GfpdParams::fpd(0.85, 3.6);
    for (auto _ : state) benchmark::DoNotOptimize(countdist::gfpd_pmf_table(p, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_FpdPmfTable)->Arg(20)->Arg(60);

static void BM_EtaModelI(benchmark::State& state) {
    wpd::FreeParams f;
    f.beta = 0.5;
    f.nu = 1.1;
    f.lambda = static_cast<double>(state.range(0));
    const auto p = wpd::make_special_case(wpd::SpecialCase::model_I, f);
    for (auto _ : state) benchmark::DoNotOptimize(wpd::eta(p));
}
BENCHMARK(BM_EtaModelI)->Arg(1)->Arg(10);

static void BM_SampleFpd(benchmark::State& state) {
    sampling::RngStream rng(1);
    for (auto _ : state) benchmark::DoNotOptimize(sampling::sample_fpd(0.85, 3.6, 1000, rng));
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_SampleFpd);

static void BM_SampleStable(benchmark::State& state) {
    sampling::RngStream rng(2);
    for (auto _ : state) benchmark::DoNotOptimize(sampling::sample_stable(0.7, rng));
}
BENCHMARK(BM_SampleStable);

static void BM_FitGridFpd(benchmark::State& state) {
    sampling::RngStream rng(3);
    const auto d = inference::CountData::from_values(sampling::sample_fpd(0.85, 3.6, 5000, rng).values);
    const auto grid = inference::default_grid("fpd", d);
    for (auto _ : state) benchmark::DoNotOptimize(inference::fit_grid("fpd", d, grid));
}
BENCHMARK(BM_FitGridFpd)->Unit(benchmark::kMillisecond)->Iterations(1);

static void BM_FitSimplexComPoisson(benchmark::State& state) {
    sampling::RngStream rng(4);
    const auto d = inference::CountData::from_values(
        sampling::sample_wpd(wpd::WpdParams::make(1, 1, 1, 2, 5), 5000, rng).values);
    const auto init = inference::default_init("com_poisson", d);
    for (auto _ : state) benchmark::DoNotOptimize(inference::fit_simplex("com_poisson", d, init));
}
BENCHMARK(BM_FitSimplexComPoisson)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
