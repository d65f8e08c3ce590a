#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace countkit::specfun {

enum class Method { series, contour };

// Result of a series-type evaluation. For the contour method terms_used is
// the number of integrand evaluations and est_truncation_error the
// quadrature error estimate.
struct SeriesValue {
    double value = 0.0;
    std::size_t terms_used = 0;
    double est_truncation_error = 0.0;
    Method method = Method::series;
    double condition = 1.0;  // largest |term| (or integral of |integrand|) over |value|
};

double log_gamma(double x);
double reciprocal_gamma(double x);
double digamma(double x);

// E^tau_{eta,nu}(w) = sum_j (tau)_j w^j / (j! Gamma(eta j + nu)).
//
// Falls back to a Hankel-contour integral for w < 0, eta <= 1 when the
// alternating series loses more than three digits to cancellation. Throws
// EvaluationError when neither route is usable.
SeriesValue prabhakar_ml(double eta, double nu, double tau, double w);

// phi(xi, omega; z) = sum_r z^r / (r! Gamma(xi r + omega)), xi > -1.
SeriesValue wright_phi(double xi, double omega, double z);

// M-Wright density M_alpha(y), 0 < alpha < 1, y >= 0.
double m_wright(double alpha, double y);

std::uint64_t stirling2(unsigned k, unsigned r);

// Partial exponential Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}); x[0] is x_1.
double bell_partial(unsigned n, unsigned k, std::span<const double> x);

// Upper tail of the chi-square law, Q(df/2, x/2).
double chi2_sf(double x, double df);

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

}  // namespace countkit::specfun
