#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "countkit/countdist.hpp"

namespace countkit::wpd {

enum class SpecialCase {
    general,
    poisson,                 // alpha = beta = gamma = nu = 1
    com_poisson,             // alpha = beta = gamma = 1
    hyper_poisson,           // alpha = gamma = nu = 1
    alt_mittag_leffler,      // gamma = nu = 1
    fractional_com_poisson,  // gamma = 1
    alt_generalized_ml,      // nu = 1
    model_I,                 // alpha = 1, gamma = beta
    model_I_2param,          // alpha = 1, gamma = beta = nu
    model_II,                // alpha = nu = 1
    model_II_2param,         // alpha = nu = 1, lambda = 1
};

// Weighted Poisson law with weight w(k) = Gamma(k + gamma) / Gamma(alpha k + beta)^nu.
struct WpdParams {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    double nu = 1.0;
    double lambda = 1.0;
    SpecialCase tag = SpecialCase::general;
    // Model I with beta = gamma -> 0 and nu >= 1: w(0) = [nu == 1], w(k) = Gamma(k)^{1-nu}.
    bool beta_zero_limit = false;

    static WpdParams make(double alpha, double beta, double gamma, double nu, double lambda);
};

struct FreeParams {
    std::optional<double> alpha, beta, gamma, nu, lambda;
    std::optional<double> xi;  // Model II: beta = xi * gamma
};

WpdParams make_special_case(SpecialCase tag, const FreeParams& free);

std::string_view tag_name(SpecialCase tag);
std::optional<SpecialCase> parse_tag(std::string_view name);

// Free parameters of a tag, in the order used by free_vector / from_free_vector.
std::vector<std::string> free_param_names(SpecialCase tag);
std::vector<double> free_vector(const WpdParams& p);
WpdParams from_free_vector(SpecialCase tag, std::span<const double> v);

double log_weight(const WpdParams& p, std::uint64_t k);
double weight(const WpdParams& p, std::uint64_t k);

struct EtaOptions {
    double epsilon = 0.9;  // largest admissible multiplier bound
    double rel_tol = 1e-17;
    std::size_t max_terms = 100'000'000;
};

struct EtaValue {
    double value = 0.0;       // partial sum; +inf when only log_value is representable
    double log_value = 0.0;
    std::size_t k_trunc = 0;  // index of the last summed term
    double remainder_bound = 0.0;
    double log_remainder_bound = 0.0;
};

EtaValue eta(const WpdParams& p, const EtaOptions& opt = {});

double wpd_pmf(const WpdParams& p, std::uint64_t x);
double wpd_log_pmf(const WpdParams& p, std::uint64_t x, const EtaValue& normalizer);

// Tags with alpha = 1 (Poisson, COM-Poisson, hyper-Poisson, Models I and II).
std::vector<double> wpd_pmf_recursive(const WpdParams& p, std::size_t x_max);

countdist::FactorialMomentSequence wpd_factorial_moments(const WpdParams& p, std::size_t R);

struct FaaOptions {
    std::size_t max_terms = 400;
    double max_rel_error = 1e-10;
};

countdist::FactorialMomentSequence wpd_factorial_moments_faa(const WpdParams& p, std::size_t R,
                                                             const FaaOptions& opt = {});

enum class Dispersion { overdispersed, underdispersed, equidispersed, indeterminate };
std::string_view dispersion_name(Dispersion d);

Dispersion dispersion_classify(const WpdParams& p);

// k -> log w(k); -inf encodes a zero weight.
using LogWeightFn = std::function<double(std::uint64_t)>;
LogWeightFn log_weight_fn(const WpdParams& p);

// f T^2 f versus (T f)^2 with relative tolerance 1e-10; equality reports equidispersed.
Dispersion turan_check(const LogWeightFn& log_w, double lambda);

// Sign pattern of the sums for k = 0..K; mixed or zero sums report indeterminate.
Dispersion sufficient_condition_check(const LogWeightFn& log_w, std::size_t K);

}  // namespace countkit::wpd
