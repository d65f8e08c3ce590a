#include "countkit/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "countkit/error.hpp"
#include "countkit/wpd.hpp"

namespace countkit::sampling {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t id) {
    std::uint64_t s = seed;
    const std::uint64_t a = splitmix64(s);
    s ^= id * 0xd1b54a32d192ed03ULL;
    const std::uint64_t b = splitmix64(s);
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
                      static_cast<std::uint32_t>(b >> 32)};
    return std::mt19937_64(seq);
}

void check_alpha(double alpha, const char* who) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError(std::string(who) + ": alpha must lie in (0, 1]");
}

// log S for the one-sided stable law, alpha < 1.
double log_stable(double alpha, RngStream& rng) {
    const double u1 = rng.next_uniform();
    const double u2 = rng.next_uniform();
    const double pi = std::numbers::pi;
    const double e = 1.0 / alpha - 1.0;
    return std::log(std::sin(alpha * pi * u1)) + e * std::log(std::sin((1.0 - alpha) * pi * u1)) -
           std::log(std::sin(pi * u1)) / alpha - e * std::log(-std::log(u2));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : engine_(seeded_engine(seed, stream_id)), seed_(seed), stream_id_(stream_id) {}

double RngStream::next_uniform() {
    // midpoints of a 2^-53 grid: never 0 or 1
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
}

double sample_stable(double alpha, RngStream& rng) {
    check_alpha(alpha, "sample_stable");
    if (alpha == 1.0) return 1.0;
    return std::exp(log_stable(alpha, rng));
}

double sample_mwright(double alpha, RngStream& rng) {
    check_alpha(alpha, "sample_mwright");
    if (alpha == 1.0) return 1.0;
    return std::exp(-alpha * log_stable(alpha, rng));
}

double sample_exponential(double rate, RngStream& rng) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DomainError("sample_exponential: rate must be positive");
    return -std::log(rng.next_uniform()) / rate;
}

std::uint64_t sample_fpd_one(double alpha, double mu, RngStream& rng) {
    check_alpha(alpha, "sample_fpd");
    if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("sample_fpd: mu must be positive");
    // waiting times V^{1/alpha} S with V ~ Exp(mu), counted while T <= 1
    std::uint64_t x = 0;
    double t = 0.0;
    for (std::size_t i = 0; i < kMaxRenewalEvents; ++i) {
        const double log_v = std::log(sample_exponential(mu, rng));
        const double log_j = alpha == 1.0 ? log_v : log_v / alpha + log_stable(alpha, rng);
        t += std::exp(log_j);
        if (t > 1.0) return x;
        ++x;
    }
    throw EvaluationError("sample_fpd: more than " + std::to_string(kMaxRenewalEvents) +
                          " renewal events in one variate (mu too large)");
}

SampleBatch sample_fpd(double alpha, double mu, std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("sample_fpd: n must be at least 1");
    SampleBatch b;
    b.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) b.values.push_back(sample_fpd_one(alpha, mu, rng));
    b.n = n;
    b.seed = rng.seed();
    return b;
}

SampleBatch sample_wpd(const wpd::WpdParams& p, std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("sample_wpd: n must be at least 1");
    constexpr std::size_t kMaxTable = 50'000'000;
    const wpd::EtaValue e = wpd::eta(p);
    const bool recursive = p.alpha == 1.0 && p.tag != wpd::SpecialCase::general;

    std::vector<double> cdf;
    double acc = 0.0;
    double lp = wpd::wpd_log_pmf(p, 0, e);
    for (std::size_t x = 0; acc <= 1.0 - 1e-12; ++x) {
        if (x >= kMaxTable)
            throw EvaluationError("sample_wpd: pmf table exceeds " + std::to_string(kMaxTable) + " entries");
        if (!recursive || x <= 1 || x % 1024 == 0) lp = wpd::wpd_log_pmf(p, x, e);
        acc += std::exp(lp);
        cdf.push_back(acc);
        const double xd = static_cast<double>(x);
        if (recursive) lp += std::log(p.lambda) + std::log(xd + p.gamma) - std::log(xd + 1.0) - p.nu * std::log(xd + p.beta);
    }
    SampleBatch b;
    b.values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = rng.next_uniform() * acc;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        b.values.push_back(static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1)));
    }
    b.n = n;
    b.seed = rng.seed();
    return b;
}

MomentEstimate mc_moment(double alpha, double mu, unsigned k, std::size_t n, RngStream& rng) {
    if (n == 0) throw DomainError("mc_moment: n must be at least 1");
    if (k == 0) return {1.0, 0.0};
    double mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = std::pow(static_cast<double>(sample_fpd_one(alpha, mu, rng)), static_cast<double>(k));
        const double d = v - mean;
        mean += d / static_cast<double>(i + 1);
        m2 += d * (v - mean);
    }
    const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace countkit::sampling
