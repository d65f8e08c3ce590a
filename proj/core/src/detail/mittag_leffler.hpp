#pragma once

#include <cstddef>
#include <span>

#include "quadrature.hpp"

namespace countkit::detail {

// Ray angle for the Hankel representation of E^tau_{eta,nu}(-mu), 0 < eta <= 1.
// Keeps |s^eta + mu| >= mu sin(pi - eta theta) with the loss factor
// sin(...)^-tau held near 1e3 at worst.
double ml_contour_theta(double eta, double tau_max);

// Component k (k = 0..n-1) is exp(log_pref[k]) * E^{tau0+k}_{eta, nu0+eta k}(-mu),
// evaluated as one vector-valued contour integral.
QuadResult ml_contour_block(double eta, double nu0, double tau0, double mu,
                            std::span<const double> log_pref, const QuadOptions& opt);

// phi(-alpha, omega; -y) for 0 < alpha < 1, y > 0.
QuadResult wright_contour(double alpha, double omega, double y, const QuadOptions& opt);

}  // namespace countkit::detail
