#include "countkit/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "countkit/baselines.hpp"
#include "countkit/countdist.hpp"
#include "countkit/error.hpp"
#include "countkit/wpd.hpp"
#include "detail/math.hpp"

namespace countkit::inference {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::optional<wpd::SpecialCase> wpd_tag(const std::string& id) {
    if (id == "poisson") return std::nullopt;
    return wpd::parse_tag(id);
}

void check_arity(const Model& m) {
    const std::size_t n = n_free_params(m.id);
    if (m.params.size() != n)
        throw DomainError("model " + m.id + " takes " + std::to_string(n) + " parameters, got " +
                          std::to_string(m.params.size()));
    for (double v : m.params)
        if (!std::isfinite(v)) throw DomainError("model " + m.id + ": parameters must be finite");
}

countdist::GfpdParams gfpd_of(const Model& m) {
    const double alpha = m.params[0], mu = m.params[1];
    if (m.id == "fpd") {
        if (alpha == 0.0) return countdist::GfpdParams::fpd_geometric_limit(mu);
        return countdist::GfpdParams::fpd(alpha, mu);
    }
    return countdist::GfpdParams::aa1(alpha, mu);
}

std::vector<double> logs_of(const std::vector<double>& pmf) {
    std::vector<double> out(pmf.size());
    std::transform(pmf.begin(), pmf.end(), out.begin(), [](double p) { return p > 0.0 ? std::log(p) : -kInf; });
    return out;
}

}  // namespace

CountData CountData::from_values(std::span<const std::uint64_t> values) {
    CountData d;
    for (std::uint64_t v : values) ++d.histogram[v];
    d.n_total = values.size();
    if (d.n_total == 0) throw DomainError("count data is empty");
    return d;
}

CountData CountData::from_histogram(const std::map<std::uint64_t, std::uint64_t>& h) {
    CountData d;
    for (const auto& [v, f] : h) {
        if (f == 0) continue;
        d.histogram[v] += f;
        d.n_total += f;
    }
    if (d.n_total == 0) throw DomainError("count data is empty");
    return d;
}

std::uint64_t CountData::max_value() const { return histogram.empty() ? 0 : histogram.rbegin()->first; }

double CountData::mean() const {
    double s = 0.0;
    for (const auto& [v, f] : histogram) s += static_cast<double>(v) * static_cast<double>(f);
    return s / static_cast<double>(n_total);
}

double CountData::variance() const {
    const double m = mean();
    double s = 0.0;
    for (const auto& [v, f] : histogram) {
        const double d = static_cast<double>(v) - m;
        s += d * d * static_cast<double>(f);
    }
    return s / static_cast<double>(n_total);
}

std::vector<std::string> model_ids() {
    return {"poisson",
            "fpd",
            "gfpd_aa1",
            "negbinom",
            "genpoisson",
            "com_poisson",
            "hyper_poisson",
            "alt_mittag_leffler",
            "fractional_com_poisson",
            "alt_generalized_ml",
            "model_I",
            "model_I_2param",
            "model_II",
            "model_II_2param",
            "wpd"};
}

bool is_model_id(const std::string& id) {
    const auto ids = model_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

std::vector<std::string> param_names(const std::string& id) {
    if (id == "poisson") return {"lambda"};
    if (id == "fpd" || id == "gfpd_aa1") return {"alpha", "mu"};
    if (id == "negbinom") return {"size", "mean"};
    if (id == "genpoisson") return {"lambda1", "lambda2"};
    if (auto tag = wpd_tag(id)) return wpd::free_param_names(*tag);
    throw DomainError("unknown model '" + id + "'");
}

std::size_t n_free_params(const std::string& id) { return param_names(id).size(); }

Bounds param_bounds(const std::string& id) {
    Bounds b;
    for (const std::string& n : param_names(id)) {
        double lo = 1e-10, hi = 1e6;
        if (n == "alpha") {
            lo = (id == "fpd" || id == "gfpd_aa1") ? 1e-3 : 0.0;
            hi = (id == "fpd" || id == "gfpd_aa1") ? 1.0 : 20.0;
        } else if (n == "size") {
            lo = 1e-6;
            hi = 1e8;
        } else if (n == "lambda2") {
            lo = -1.0;
            hi = 1.0 - 1e-9;
        } else if (n == "beta") {
            lo = id == "model_I" ? 0.0 : 1e-10;
            hi = 1e3;
        } else if (n == "gamma") {
            hi = 1e3;
        } else if (n == "nu") {
            lo = 0.0;
            hi = 50.0;
        }
        b.lower.push_back(lo);
        b.upper.push_back(hi);
    }
    return b;
}

void validate(const Model& m) {
    check_arity(m);
    const auto& p = m.params;
    if (m.id == "poisson") {
        if (!(p[0] > 0.0)) throw DomainError("poisson: lambda must be positive");
    } else if (m.id == "fpd" || m.id == "gfpd_aa1") {
        if (m.id == "gfpd_aa1" && p[0] == 0.0) throw DomainError("gfpd_aa1: alpha must lie in (0, 1]");
        gfpd_of(m);
    } else if (m.id == "negbinom") {
        baselines::NegBinomParams::from_size_mean(p[0], p[1]);
    } else if (m.id == "genpoisson") {
        baselines::GenPoissonParams::make(p[0], p[1]);
    } else if (auto tag = wpd_tag(m.id)) {
        wpd::from_free_vector(*tag, p);
    } else {
        throw DomainError("unknown model '" + m.id + "'");
    }
}

std::vector<double> log_pmf_table(const Model& m, std::uint64_t x_max) {
    validate(m);
    const auto& p = m.params;
    std::vector<double> out(x_max + 1);
    if (m.id == "poisson") {
        const double ll = std::log(p[0]);
        for (std::uint64_t x = 0; x <= x_max; ++x) {
            const double xd = static_cast<double>(x);
            out[x] = xd * ll - p[0] - detail::lgam(xd + 1.0);
        }
    } else if (m.id == "fpd" || m.id == "gfpd_aa1") {
        out = logs_of(countdist::gfpd_pmf_table(gfpd_of(m), x_max));
    } else if (m.id == "negbinom") {
        const auto nb = baselines::NegBinomParams::from_size_mean(p[0], p[1]);
        for (std::uint64_t x = 0; x <= x_max; ++x) out[x] = baselines::negbinom_log_pmf(nb, x);
    } else if (m.id == "genpoisson") {
        const auto gp = baselines::GenPoissonParams::make(p[0], p[1]);
        for (std::uint64_t x = 0; x <= x_max; ++x) out[x] = baselines::genpoisson_log_pmf(gp, x);
    } else {
        const wpd::WpdParams w = wpd::from_free_vector(*wpd_tag(m.id), p);
        const wpd::EtaValue e = wpd::eta(w);
        for (std::uint64_t x = 0; x <= x_max; ++x) out[x] = wpd::wpd_log_pmf(w, x, e);
    }
    return out;
}

double loglik(const Model& m, const CountData& data) {
    const std::vector<double> lp = log_pmf_table(m, data.max_value());
    double s = 0.0;
    for (const auto& [v, f] : data.histogram) {
        if (std::isnan(lp[v])) throw EvaluationError("loglik: pmf of " + m.id + " not evaluable at x=" + std::to_string(v));
        if (lp[v] == -kInf) return -kInf;
        s += static_cast<double>(f) * lp[v];
    }
    return s;
}

Grid cartesian_grid(const std::vector<std::vector<double>>& axes) {
    Grid g{{}};
    for (const auto& axis : axes) {
        Grid next;
        for (const auto& prefix : g)
            for (double v : axis) {
                auto q = prefix;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        g = std::move(next);
    }
    return g;
}

Grid default_grid(const std::string& id, const CountData& data) {
    if (id != "fpd" && id != "gfpd_aa1") throw DomainError("no default grid for model " + id + "; use the simplex");
    const double mean = data.mean();
    if (!(mean > 0.0)) throw DomainError("default grid needs a positive sample mean");
    Grid g;
    for (int i = id == "fpd" ? 0 : 1; i <= 100; ++i) {
        const double a = i / 100.0;
        const double scale = id == "fpd" ? std::tgamma(1.0 + a) : std::tgamma(2.0 * a) / std::tgamma(a);
        for (int j = 0; j <= 40; ++j) g.push_back({a, mean * scale * (0.8 + 0.01 * j)});
    }
    return g;
}

static FitResult finish_fit(const std::string& id, const CountData& data, std::vector<double> params, double ll,
                     bool converged, std::size_t evaluations, const GofOptions& gof) {
    FitResult r;
    r.model_id = id;
    r.param_names = param_names(id);
    r.params = std::move(params);
    r.loglik = ll;
    r.converged = converged;
    r.evaluations = evaluations;
    try {
        const GofResult g = gof_chisq(Model{id, r.params}, data, gof);
        r.chi2 = g.chi2;
        r.df = g.df;
        r.p_value = g.p_value;
    } catch (const DomainError&) {
        r.chi2 = std::numeric_limits<double>::quiet_NaN();
        r.df = 0;
        r.p_value = std::numeric_limits<double>::quiet_NaN();
    }
    return r;
}

FitResult fit_grid(const std::string& id, const CountData& data, const Grid& grid, const GofOptions& gof) {
    if (grid.empty()) throw DomainError("fit_grid: empty grid");
    std::optional<std::size_t> best;
    double best_ll = -kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double ll;
        try {
            ll = loglik(Model{id, grid[i]}, data);
        } catch (const Error&) {
            continue;
        }
        if (std::isnan(ll) || ll == -kInf) continue;
        if (!best || ll > best_ll ||
            (ll == best_ll && std::lexicographical_compare(grid[i].begin(), grid[i].end(), grid[*best].begin(),
                                                           grid[*best].end()))) {
            best = i;
            best_ll = ll;
        }
    }
    if (!best) throw EvaluationError("fit_grid: log-likelihood failed at every grid point for " + id);
    return finish_fit(id, data, grid[*best], best_ll, true, grid.size(), gof);
}

FitResult fit_simplex(const std::string& id, const CountData& data, const std::vector<double>& init,
                      const SimplexOptions& opt, const GofOptions& gof) {
    validate(Model{id, init});
    const Bounds box = param_bounds(id);
    const std::size_t n = init.size();
    for (std::size_t j = 0; j < n; ++j)
        if (init[j] < box.lower[j] || init[j] > box.upper[j])
            throw DomainError("fit_simplex: initial " + param_names(id)[j] + " outside [" +
                              std::to_string(box.lower[j]) + ", " + std::to_string(box.upper[j]) + "]");

    std::size_t evals = 0;
    auto objective = [&](const std::vector<double>& x) {
        ++evals;
        try {
            const double ll = loglik(Model{id, x}, data);
            return std::isnan(ll) ? kInf : -ll;
        } catch (const Error&) {
            return kInf;
        }
    };
    auto project = [&](std::vector<double> x) {
        for (std::size_t j = 0; j < n; ++j) x[j] = std::clamp(x[j], box.lower[j], box.upper[j]);
        return x;
    };

    std::vector<double> best = init;
    double best_f = objective(best);
    if (best_f == kInf) throw DomainError("fit_simplex: log-likelihood is -inf at the initial point");

    bool converged = false;
    for (int run = 0; run < 2 && evals < opt.max_evaluations; ++run) {
        std::vector<std::vector<double>> v{best};
        std::vector<double> f{best_f};
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<double> x = best;
            const double step = x[j] != 0.0 ? 0.1 * std::abs(x[j]) : 0.05;
            x[j] = x[j] + step <= box.upper[j] ? x[j] + step : x[j] - step;
            x = project(std::move(x));
            v.push_back(x);
            f.push_back(objective(x));
        }
        converged = false;
        while (evals < opt.max_evaluations) {
            std::vector<std::size_t> idx(n + 1);
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            std::vector<std::vector<double>> v2;
            std::vector<double> f2;
            for (std::size_t i : idx) {
                v2.push_back(v[i]);
                f2.push_back(f[i]);
            }
            v = std::move(v2);
            f = std::move(f2);

            double diam = 0.0;
            for (std::size_t i = 1; i <= n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    diam = std::max(diam, std::abs(v[i][j] - v[0][j]) / (1.0 + std::abs(v[0][j])));
            if (diam < opt.tol) {
                converged = true;
                break;
            }

            std::vector<double> c(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) c[j] += v[i][j] / static_cast<double>(n);
            auto along = [&](double t) {
                std::vector<double> x(n);
                for (std::size_t j = 0; j < n; ++j) x[j] = c[j] + t * (v[n][j] - c[j]);
                return project(std::move(x));
            };
            const std::vector<double> xr = along(-1.0);
            const double fr = objective(xr);
            if (fr < f[0]) {
                const std::vector<double> xe = along(-2.0);
                const double fe = objective(xe);
                if (fe < fr) {
                    v[n] = xe;
                    f[n] = fe;
                } else {
                    v[n] = xr;
                    f[n] = fr;
                }
            } else if (fr < f[n - 1]) {
                v[n] = xr;
                f[n] = fr;
            } else {
                const bool outside = fr < f[n];
                const std::vector<double> xc = along(outside ? -0.5 : 0.5);
                const double fc = objective(xc);
                if (fc < (outside ? fr : f[n])) {
                    v[n] = xc;
                    f[n] = fc;
                } else {
                    for (std::size_t i = 1; i <= n; ++i) {
                        for (std::size_t j = 0; j < n; ++j) v[i][j] = v[0][j] + 0.5 * (v[i][j] - v[0][j]);
                        v[i] = project(std::move(v[i]));
                        f[i] = objective(v[i]);
                    }
                }
            }
        }
        const auto it = std::min_element(f.begin(), f.end());
        if (*it <= best_f) {
            best_f = *it;
            best = v[static_cast<std::size_t>(it - f.begin())];
        }
    }
    return finish_fit(id, data, best, -best_f, converged, evals, gof);
}

std::vector<double> default_init(const std::string& id, const CountData& data) {
    const double m = std::max(data.mean(), 1e-3);
    const double var = std::max(data.variance(), 1e-3);
    const double disp = std::clamp(m / var, 0.05, 20.0);  // ~ COM-Poisson nu
    const double com_lambda = std::max(std::pow(m + (disp - 1.0) / (2.0 * disp), disp), 1e-3);
    auto wpd_init = [&](std::initializer_list<std::pair<const char*, double>> vals) {
        std::vector<double> out;
        for (const std::string& n : param_names(id)) {
            double v = 1.0;
            for (const auto& [k, x] : vals)
                if (n == k) v = x;
            out.push_back(v);
        }
        return out;
    };
    if (id == "poisson") return {m};
    if (id == "fpd") return {0.9, m * std::tgamma(1.9)};
    if (id == "gfpd_aa1") return {0.9, m * std::tgamma(1.8) / std::tgamma(0.9)};
    if (id == "negbinom") return {var > m ? std::min(m * m / (var - m), 1e6) : 1e3, m};
    if (id == "genpoisson") {
        double l2 = std::clamp(1.0 - std::sqrt(m / var), -0.9, 0.95);
        double l1 = m * (1.0 - l2);
        if (l2 < 0.0) l2 = std::max(l2, -0.5 * l1 / (static_cast<double>(data.max_value()) + 1.0));
        l1 = m * (1.0 - l2);
        return {l1, l2};
    }
    if (id == "com_poisson" || id == "model_I" || id == "fractional_com_poisson")
        return wpd_init({{"lambda", com_lambda}, {"nu", disp}});
    if (id == "hyper_poisson" || id == "alt_mittag_leffler") {
        const double b = std::clamp(var / m, 0.1, 50.0);
        return wpd_init({{"lambda", std::max(m + b - 1.0, 0.1 * m)}, {"beta", b}});
    }
    if (id == "model_II_2param") return wpd_init({{"gamma", (m + 1.0) * (m + 1.0) - m}});
    if (id == "alt_generalized_ml") return wpd_init({{"lambda", std::min(m, 0.9)}});
    return wpd_init({{"lambda", m}});
}

FitResult fit_default(const std::string& id, const CountData& data, const GofOptions& gof) {
    if (id == "fpd" || id == "gfpd_aa1") return fit_grid(id, data, default_grid(id, data), gof);
    return fit_simplex(id, data, default_init(id, data), {}, gof);
}

std::vector<CompareRow> compare(const std::vector<std::string>& ids, const CountData& data, const GofOptions& gof) {
    if (ids.size() < 2) throw DomainError("compare: need at least two models");
    for (const auto& id : ids)
        if (!is_model_id(id)) throw DomainError("compare: unknown model '" + id + "'");
    std::vector<CompareRow> rows;
    for (const auto& id : ids) {
        CompareRow row;
        try {
            row.fit = fit_default(id, data, gof);
        } catch (const Error& e) {
            row.fit.model_id = id;
            row.fit.param_names = param_names(id);
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    auto key = [](const CompareRow& r) {
        return r.error || std::isnan(r.fit.p_value) ? -1.0 : r.fit.p_value;
    };
    std::stable_sort(rows.begin(), rows.end(), [&](const CompareRow& a, const CompareRow& b) { return key(a) > key(b); });
    return rows;
}

}  // namespace countkit::inference
