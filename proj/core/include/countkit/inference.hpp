#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace countkit::inference {

struct CountData {
    std::map<std::uint64_t, std::uint64_t> histogram;  // value -> frequency >= 1
    std::uint64_t n_total = 0;

    static CountData from_values(std::span<const std::uint64_t> values);
    // Zero frequencies are dropped; repeated values are merged.
    static CountData from_histogram(const std::map<std::uint64_t, std::uint64_t>& h);

    std::uint64_t max_value() const;
    double mean() const;
    double variance() const;  // divisor n
};

// Model ids: poisson, fpd, gfpd_aa1, negbinom, genpoisson and the WPD tags
// (com_poisson, hyper_poisson, ..., model_II_2param, wpd for the general law).
struct Model {
    std::string id;
    std::vector<double> params;  // in the order of param_names(id)
};

std::vector<std::string> model_ids();
bool is_model_id(const std::string& id);
std::vector<std::string> param_names(const std::string& id);
std::size_t n_free_params(const std::string& id);

// Box used by the simplex; bounds are inclusive after projection.
struct Bounds {
    std::vector<double> lower, upper;
};
Bounds param_bounds(const std::string& id);

// Throws DomainError when the parameters are outside the model's domain.
void validate(const Model& m);

// log pmf at x = 0..x_max; -inf for zero mass.
std::vector<double> log_pmf_table(const Model& m, std::uint64_t x_max);

double loglik(const Model& m, const CountData& data);

struct GofOptions {
    bool pool = true;        // merge cells until every expected count is >= 5
    double min_expected = 5.0;
};

struct GofResult {
    double chi2 = 0.0;
    std::size_t df = 0;
    double p_value = 1.0;
    std::vector<std::uint64_t> cell_lo;  // first value of each cell; the last cell is open to the right
    std::vector<double> observed, expected;
};

GofResult gof_chisq(const Model& m, const CountData& data, const GofOptions& opt = {});

struct FitResult {
    std::string model_id;
    std::vector<std::string> param_names;
    std::vector<double> params;
    double loglik = 0.0;
    double chi2 = 0.0;
    std::size_t df = 0;
    double p_value = 0.0;
    bool converged = false;
    std::size_t evaluations = 0;
};

// Grid points are parameter vectors; ties go to the lexicographically smallest vector.
using Grid = std::vector<std::vector<double>>;
Grid cartesian_grid(const std::vector<std::vector<double>>& axes);

// fpd: alpha in {0, 0.01, ..., 1} with mu in mean Gamma(1 + alpha) [0.8, 1.2] (41 steps).
// gfpd_aa1: alpha in {0.01, ..., 1} with mu in mean Gamma(2 alpha) / Gamma(alpha) [0.8, 1.2].
Grid default_grid(const std::string& id, const CountData& data);

FitResult fit_grid(const std::string& id, const CountData& data, const Grid& grid, const GofOptions& gof = {});

struct SimplexOptions {
    double tol = 1e-6;  // relative simplex diameter
    std::size_t max_evaluations = 10'000;
};

FitResult fit_simplex(const std::string& id, const CountData& data, const std::vector<double>& init,
                      const SimplexOptions& opt = {}, const GofOptions& gof = {});

// Method-of-moments style starting point for the simplex.
std::vector<double> default_init(const std::string& id, const CountData& data);

// Grid for fpd and gfpd_aa1, simplex from default_init otherwise.
FitResult fit_default(const std::string& id, const CountData& data, const GofOptions& gof = {});

struct CompareRow {
    FitResult fit;
    std::optional<std::string> error;  // set when the model could not be fitted
};

// Rows sorted by p-value, descending; failed rows last in input order.
std::vector<CompareRow> compare(const std::vector<std::string>& ids, const CountData& data,
                                const GofOptions& gof = {});

}  // namespace countkit::inference
