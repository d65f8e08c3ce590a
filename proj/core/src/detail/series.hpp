#pragma once

#include <cmath>
#include <cstddef>
#include <limits>

namespace countkit::detail {

struct SeriesTerm {
    double log_abs;       // -inf for an exact zero
    int sign;             // -1, 0, +1
    double log_envelope;  // bound used by the tail certificate; equals log_abs for ordinary terms
    double log_mag;       // sum of magnitudes of the pieces added to form log_abs
};

// log_mag feeds the rounding estimate: a term assembled from log pieces of
// size L carries a relative error of roughly L * epsilon.
inline SeriesTerm make_term(double log_abs, int sign, double log_mag) { return {log_abs, sign, log_abs, log_mag}; }

struct SeriesOptions {
    double rel_tol = 1e-15;
    std::size_t run_length = 5;
    std::size_t max_terms = 1'000'000;
    double log_overflow = 700.0;
    // Give up as soon as a term exceeds this magnitude; lets callers switch
    // method before paying for a hopeless summation.
    double abort_log_term = std::numeric_limits<double>::infinity();
};

enum class SeriesStatus { ok, overflow, budget, aborted };

struct SeriesSum {
    double value = 0.0;
    double max_abs_term = 0.0;
    double tail_bound = 0.0;
    double rounding_error = 0.0;  // estimated absolute error from summation and term evaluation
    std::size_t terms = 0;
    SeriesStatus status = SeriesStatus::ok;

    double cancellation() const {
        if (value == 0.0) return max_abs_term == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
        return max_abs_term / std::abs(value);
    }
    double relative_error() const {
        if (value == 0.0) return rounding_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        return (rounding_error + tail_bound) / std::abs(value);
    }
};

// Neumaier-compensated summation of sum_j term(j), j = 0, 1, ...
//
// Stops once run_length consecutive terms are below rel_tol |S| and the
// envelope ratio over the last run_length terms is < 1 and non-increasing, in
// which case the geometric bound env_j q / (1 - q) certifies the tail.
template <class TermFn>
SeriesSum sum_series(TermFn&& term, const SeriesOptions& opt = {}) {
    SeriesSum out;
    double sum = 0.0;
    double comp = 0.0;
    std::size_t small_run = 0;
    std::size_t monotone_run = 0;
    double prev_env = -std::numeric_limits<double>::infinity();
    double prev_ratio = std::numeric_limits<double>::infinity();

    for (std::size_t j = 0; j < opt.max_terms; ++j) {
        const SeriesTerm t = term(j);
        if (t.log_abs > opt.log_overflow || t.log_envelope > opt.log_overflow) {
            out.status = SeriesStatus::overflow;
            out.terms = j + 1;
            out.value = sum + comp;
            return out;
        }
        if (t.log_abs > opt.abort_log_term) {
            out.status = SeriesStatus::aborted;
            out.terms = j + 1;
            out.value = sum + comp;
            return out;
        }
        const double v = t.sign == 0 ? 0.0 : t.sign * std::exp(t.log_abs);
        const double next = sum + v;
        if (std::abs(sum) >= std::abs(v)) comp += (sum - next) + v;
        else comp += (v - next) + sum;
        sum = next;
        out.max_abs_term = std::max(out.max_abs_term, std::abs(v));
        out.rounding_error += std::abs(v) * std::numeric_limits<double>::epsilon() * (4.0 + t.log_mag);

        const double total = std::abs(sum + comp);
        const double env = std::exp(t.log_envelope);
        small_run = (env <= opt.rel_tol * total) ? small_run + 1 : 0;

        double ratio = std::numeric_limits<double>::infinity();
        if (std::isfinite(prev_env) && std::isfinite(t.log_envelope))
            ratio = std::exp(t.log_envelope - prev_env);
        else if (!std::isfinite(t.log_envelope) && j > 0)
            ratio = 0.0;
        monotone_run = (ratio < 1.0 && ratio <= prev_ratio * (1.0 + 1e-12)) ? monotone_run + 1 : 0;
        prev_ratio = ratio;
        prev_env = t.log_envelope;

        if (small_run >= opt.run_length && monotone_run >= opt.run_length) {
            const double bound = env * ratio / (1.0 - ratio);
            if (bound <= opt.rel_tol * total || (total == 0.0 && bound == 0.0)) {
                out.terms = j + 1;
                out.value = sum + comp;
                out.tail_bound = bound;
                return out;
            }
        }
    }
    out.status = SeriesStatus::budget;
    out.terms = opt.max_terms;
    out.value = sum + comp;
    return out;
}

}  // namespace countkit::detail
