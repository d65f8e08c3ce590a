#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace countkit::wpd {
struct WpdParams;
}

namespace countkit::sampling {

// Seeded uniform stream on the open interval (0, 1). Substreams with distinct
// ids are statistically independent streams derived from the same seed.
class RngStream {
  public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

    double next_uniform();
    std::uint64_t next_u64() { return engine_(); }
    RngStream substream(std::uint64_t id) const { return RngStream(seed_, id); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

  private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
    std::uint64_t stream_id_;
};

struct SampleBatch {
    std::vector<std::uint64_t> values;
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

struct MomentEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// One-sided stable variable with Laplace transform exp(-t^alpha).
double sample_stable(double alpha, RngStream& rng);

// S^{-alpha}, whose density is the M-Wright function; computed without forming S.
double sample_mwright(double alpha, RngStream& rng);

double sample_exponential(double rate, RngStream& rng);

std::uint64_t sample_fpd_one(double alpha, double mu, RngStream& rng);
SampleBatch sample_fpd(double alpha, double mu, std::size_t n, RngStream& rng);

// Inverse-CDF sampling over a pmf table extended until the mass exceeds 1 - 1e-12.
SampleBatch sample_wpd(const wpd::WpdParams& p, std::size_t n, RngStream& rng);

// Mean of X^k over n fPd variates.
MomentEstimate mc_moment(double alpha, double mu, unsigned k, std::size_t n, RngStream& rng);

inline constexpr std::size_t kMaxRenewalEvents = 10'000'000;

}  // namespace countkit::sampling
