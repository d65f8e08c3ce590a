#pragma once

#include <cmath>
#include <numbers>

namespace countkit::detail {

// std::lgamma may write the global signgam; lgamma_r keeps evaluation reentrant.
inline double lgam(double x) {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

inline double lgam(double x, int& sign) { return ::lgamma_r(x, &sign); }

// sin(pi x) with exact zeros at the integers.
inline double sin_pi(double x) {
    double r = x - 2.0 * std::nearbyint(0.5 * x);  // r in [-1, 1]
    if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

// log|1/Gamma(x)| and its sign; sign 0 at the poles.
inline double log_abs_rgamma(double x, int& sign) {
    if (x <= 0.0 && x == std::nearbyint(x)) {
        sign = 0;
        return -INFINITY;
    }
    int s = 1;
    double lg = lgam(x, s);
    sign = s;
    return -lg;
}

// Upper envelope for log|1/Gamma(x)|, finite at the poles.
inline double log_rgamma_envelope(double x) {
    if (x > 0.5) return -lgam(x);
    // |1/Gamma(x)| = |sin(pi x)| Gamma(1 - x) / pi <= Gamma(1 - x) / pi
    return lgam(1.0 - x) - std::log(std::numbers::pi);
}

inline bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::nearbyint(x); }

}  // namespace countkit::detail
