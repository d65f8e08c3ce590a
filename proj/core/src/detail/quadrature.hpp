#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace countkit::detail {

struct QuadOptions {
    double abs_tol = 1e-15;
    double rel_tol = 1e-13;
    std::size_t max_intervals = 4000;
};

struct QuadResult {
    std::vector<double> value;
    std::vector<double> error;
    std::vector<double> l1;  // integral of |f_k|, for conditioning
    std::size_t evaluations = 0;
    bool converged = false;
};

namespace gk15 {
inline constexpr std::array<double, 8> xgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> wgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
}  // namespace gk15

// Globally adaptive Gauss-Kronrod (7/15) quadrature of a vector-valued
// integrand f(t, out) over [breaks.front(), breaks.back()]. Error estimates
// follow the QUADPACK qk15 heuristic, applied per component.
template <class F>
QuadResult integrate_adaptive(F&& f, std::span<const double> breaks, std::size_t dim,
                              const QuadOptions& opt = {}) {
    constexpr double eps = std::numeric_limits<double>::epsilon();

    struct Interval {
        double a, b;
        double worst;
        std::vector<double> val, err, abs;
    };

    std::vector<std::vector<double>> fv(15, std::vector<double>(dim));
    QuadResult res;

    auto rule = [&](double a, double b) {
        Interval iv{a, b, 0.0, std::vector<double>(dim), std::vector<double>(dim),
                    std::vector<double>(dim)};
        const double c = 0.5 * (a + b);
        const double h = 0.5 * (b - a);
        f(c, std::span<double>(fv[7]));
        for (int j = 0; j < 7; ++j) {
            f(c - h * gk15::xgk[j], std::span<double>(fv[j]));
            f(c + h * gk15::xgk[j], std::span<double>(fv[14 - j]));
        }
        res.evaluations += 15;
        for (std::size_t k = 0; k < dim; ++k) {
            double rk = gk15::wgk[7] * fv[7][k];
            double rg = gk15::wg[3] * fv[7][k];
            double ra = std::abs(rk);
            for (int j = 0; j < 7; ++j) {
                const double s = fv[j][k] + fv[14 - j][k];
                rk += gk15::wgk[j] * s;
                ra += gk15::wgk[j] * (std::abs(fv[j][k]) + std::abs(fv[14 - j][k]));
                if (j % 2 == 1) rg += gk15::wg[j / 2] * s;
            }
            const double mean = 0.5 * rk;
            double asc = gk15::wgk[7] * std::abs(fv[7][k] - mean);
            for (int j = 0; j < 7; ++j)
                asc += gk15::wgk[j] * (std::abs(fv[j][k] - mean) + std::abs(fv[14 - j][k] - mean));
            double e = std::abs((rk - rg) * h);
            asc *= std::abs(h);
            ra *= std::abs(h);
            if (asc != 0.0 && e != 0.0) e = asc * std::min(1.0, std::pow(200.0 * e / asc, 1.5));
            if (ra > std::numeric_limits<double>::min() / (50.0 * eps)) e = std::max(50.0 * eps * ra, e);
            if (!std::isfinite(rk)) e = std::numeric_limits<double>::infinity();
            iv.val[k] = rk * h;
            iv.err[k] = e;
            iv.abs[k] = ra;
            iv.worst = std::max(iv.worst, e);
        }
        return iv;
    };

    auto cmp = [](const Interval& x, const Interval& y) { return x.worst < y.worst; };
    std::vector<Interval> heap;
    res.value.assign(dim, 0.0);
    res.error.assign(dim, 0.0);
    res.l1.assign(dim, 0.0);
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        heap.push_back(rule(breaks[i], breaks[i + 1]));
        for (std::size_t k = 0; k < dim; ++k) {
            res.value[k] += heap.back().val[k];
            res.error[k] += heap.back().err[k];
            res.l1[k] += heap.back().abs[k];
        }
    }
    std::make_heap(heap.begin(), heap.end(), cmp);

    auto done = [&] {
        for (std::size_t k = 0; k < dim; ++k) {
            const double tol = std::max({opt.abs_tol, opt.rel_tol * std::abs(res.value[k]),
                                         64.0 * eps * res.l1[k]});
            if (!(res.error[k] <= tol)) return false;
        }
        return true;
    };

    while (!done()) {
        if (heap.size() >= opt.max_intervals) {
            res.converged = false;
            return res;
        }
        std::pop_heap(heap.begin(), heap.end(), cmp);
        Interval worst = std::move(heap.back());
        heap.pop_back();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b)) {
            res.converged = false;
            return res;
        }
        Interval left = rule(worst.a, mid);
        Interval right = rule(mid, worst.b);
        for (std::size_t k = 0; k < dim; ++k) {
            res.value[k] += left.val[k] + right.val[k] - worst.val[k];
            res.error[k] = std::max(0.0, res.error[k] + left.err[k] + right.err[k] - worst.err[k]);
            res.l1[k] += left.abs[k] + right.abs[k] - worst.abs[k];
        }
        heap.push_back(std::move(left));
        std::push_heap(heap.begin(), heap.end(), cmp);
        heap.push_back(std::move(right));
        std::push_heap(heap.begin(), heap.end(), cmp);
    }

    // Re-accumulate to shed drift from the incremental updates.
    std::fill(res.value.begin(), res.value.end(), 0.0);
    std::fill(res.error.begin(), res.error.end(), 0.0);
    std::fill(res.l1.begin(), res.l1.end(), 0.0);
    for (const auto& iv : heap)
        for (std::size_t k = 0; k < dim; ++k) {
            res.value[k] += iv.val[k];
            res.error[k] += iv.err[k];
            res.l1[k] += iv.abs[k];
        }
    res.converged = true;
    return res;
}

// (1/2 pi i) * integral over a Hankel contour of g(s) ds, for g real on the
// positive axis and analytic off the negative one. The contour is the arc
// |s| = radius for |arg s| <= theta joined to the rays arg s = +-theta, with
// pi/2 < theta <= pi. g(s, out) writes one complex value per component.
template <class G>
QuadResult hankel_integral(G&& g, double theta, double radius, std::size_t dim,
                           const QuadOptions& opt = {}) {
    const std::complex<double> dir = std::polar(1.0, theta);
    const double scale = 2.0 / std::abs(std::cos(theta));  // makes the mapped ray integrand vanish at t = 1
    std::vector<std::complex<double>> buf(dim);
    auto integrand = [&](double t, std::span<double> out) {
        if (t <= 1.0) {
            const double phi = t * theta;
            const std::complex<double> e = std::polar(radius, phi);
            g(e, std::span<std::complex<double>>(buf));
            for (std::size_t k = 0; k < dim; ++k) out[k] = (buf[k] * e).real() * theta / std::numbers::pi;
        } else {
            const double u = t - 1.0;  // in (0, 1)
            const double r = radius - scale * std::log1p(-u);
            const double jac = scale / (1.0 - u);
            g(r * dir, std::span<std::complex<double>>(buf));
            for (std::size_t k = 0; k < dim; ++k) {
                const double v = (buf[k] * dir).imag() * jac / std::numbers::pi;
                out[k] = std::isfinite(v) ? v : 0.0;
            }
        }
    };
    const std::array<double, 5> breaks = {0.0, 0.5, 1.0, 1.5, 2.0};
    return integrate_adaptive(integrand, std::span<const double>(breaks), dim, opt);
}

}  // namespace countkit::detail
