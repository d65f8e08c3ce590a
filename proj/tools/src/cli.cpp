#include "countkit/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "countkit/baselines.hpp"
#include "countkit/countdist.hpp"
#include "countkit/error.hpp"
#include "countkit/sampling.hpp"
#include "countkit/wpd.hpp"

namespace countkit::cli {

namespace {

using nlohmann::json;

class UsageError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

std::uint64_t parse_count(const std::string& tok, std::size_t line, const char* what) {
    std::uint64_t v = 0;
    const char* end = tok.data() + tok.size();
    const auto [ptr, ec] = std::from_chars(tok.data(), end, v);
    if (tok.empty() || ec != std::errc() || ptr != end)
        throw ParseError(line, std::string("expected a non-negative integer ") + what + ", got '" + tok + "'");
    return v;
}

bool is_gfpd_family(const std::string& id) { return id == "fpd" || id == "gfpd_aa1" || id == "gfpd"; }

double need(const RunConfig& c, const std::string& name) {
    const auto it = c.params.find(name);
    if (it == c.params.end()) throw UsageError("model " + c.model + " needs --" + name);
    return it->second;
}

countdist::GfpdParams gfpd_params(const RunConfig& c) {
    if (c.model == "gfpd") return countdist::GfpdParams::make(need(c, "alpha"), need(c, "beta"), need(c, "delta"), need(c, "mu"));
    const double alpha = need(c, "alpha");
    if (c.model == "gfpd_aa1") return countdist::GfpdParams::aa1(alpha, need(c, "mu"));
    if (alpha == 0.0) return countdist::GfpdParams::fpd_geometric_limit(need(c, "mu"));
    return countdist::GfpdParams::fpd(alpha, need(c, "mu"));
}

inference::Model model_of(const RunConfig& c) {
    if (!inference::is_model_id(c.model)) throw UsageError("unknown model '" + c.model + "'");
    RunConfig adj = c;
    if ((c.model == "model_II" || c.model == "model_II_2param") && c.params.count("xi") && !c.params.count("beta"))
        adj.params["beta"] = c.params.at("xi") * need(c, "gamma");
    inference::Model m{c.model, {}};
    for (const std::string& n : inference::param_names(c.model)) m.params.push_back(need(adj, n));
    inference::validate(m);
    return m;
}

json params_json(const std::vector<std::string>& names, const std::vector<double>& values) {
    json j = json::object();
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) j[names[i]] = values[i];
    return j;
}

std::string params_text(const std::vector<std::string>& names, const std::vector<double>& values) {
    std::ostringstream s;
    s << std::setprecision(6);
    for (std::size_t i = 0; i < names.size() && i < values.size(); ++i) s << (i ? " " : "") << names[i] << "=" << values[i];
    return s.str();
}

std::string num(double v, int prec = 10) {
    if (std::isnan(v)) return "nan";
    std::ostringstream s;
    s << std::setprecision(prec) << v;
    return s.str();
}

// pmf over 0..x_max, or until the mass reaches 1 - 1e-12 when x_max is absent.
std::vector<double> model_pmf(const inference::Model& m, std::optional<std::uint64_t> x_max) {
    auto table = [&](std::uint64_t hi) {
        std::vector<double> p = inference::log_pmf_table(m, hi);
        for (double& v : p) v = std::exp(v);
        return p;
    };
    if (x_max) return table(*x_max);
    constexpr std::uint64_t kCap = 10'000'000;
    for (std::uint64_t hi = 64;; hi *= 2) {
        std::vector<double> p = table(std::min(hi, kCap));
        double acc = 0.0;
        for (std::size_t x = 0; x < p.size(); ++x) {
            acc += p[x];
            if (acc >= 1.0 - 1e-12) {
                p.resize(x + 1);
                return p;
            }
        }
        if (hi >= kCap) throw EvaluationError("pmf: mass below 1 - 1e-12 within " + std::to_string(kCap) + " values");
    }
}

void emit_pmf(const RunConfig& c, const std::vector<double>& p, const std::vector<double>* se, std::ostream& out,
              const json& params) {
    if (c.output_format == OutputFormat::json) {
        json rows = json::array();
        for (std::size_t x = 0; x < p.size(); ++x) {
            json r{{"x", x}, {"probability", p[x]}};
            if (se) r["std_error"] = (*se)[x];
            rows.push_back(r);
        }
        out << json{{"model", c.model}, {"params", params}, {"pmf", rows}}.dump(2) << "\n";
        return;
    }
    const bool csv = c.output_format == OutputFormat::csv;
    out << std::setprecision(17);
    if (csv) out << "x,probability" << (se ? ",std_error" : "") << "\n";
    else out << std::setw(8) << "x" << "  " << std::setw(24) << "probability" << (se ? "  std_error" : "") << "\n";
    for (std::size_t x = 0; x < p.size(); ++x) {
        if (csv) {
            out << x << "," << p[x];
            if (se) out << "," << (*se)[x];
        } else {
            out << std::setw(8) << x << "  " << std::setw(24) << p[x];
            if (se) out << "  " << (*se)[x];
        }
        out << "\n";
    }
}

int cmd_pmf(const RunConfig& c, std::ostream& out) {
    if (is_gfpd_family(c.model)) {
        const countdist::GfpdParams g = gfpd_params(c);
        const json params = c.model == "gfpd"
                                ? json{{"alpha", g.alpha}, {"beta", g.beta}, {"delta", g.delta}, {"mu", g.mu}}
                                : json{{"alpha", g.geometric_limit ? 0.0 : g.alpha}, {"mu", g.mu}};
        try {
            const std::vector<double> p = c.x_max ? countdist::gfpd_pmf_table(g, *c.x_max) : countdist::gfpd_pmf_support(g);
            emit_pmf(c, p, nullptr, out, params);
        } catch (const EvaluationError&) {
            // deterministic routes refused: stable-expectation Monte Carlo per value
            const countdist::SummaryStats s = countdist::gfpd_summary(g);
            const std::uint64_t hi =
                c.x_max ? *c.x_max : static_cast<std::uint64_t>(std::ceil(s.mean + 10.0 * std::sqrt(s.variance) + 10.0));
            sampling::RngStream rng(c.seed);
            std::vector<double> p, se;
            for (std::uint64_t x = 0; x <= hi; ++x) {
                sampling::RngStream sub = rng.substream(x);
                const countdist::McEstimate e = countdist::gfpd_pmf_mc(g, x, c.mc_n, sub);
                p.push_back(e.value);
                se.push_back(e.std_error);
            }
            emit_pmf(c, p, &se, out, params);
        }
        return ok;
    }
    const inference::Model m = model_of(c);
    emit_pmf(c, model_pmf(m, c.x_max), nullptr, out, params_json(inference::param_names(m.id), m.params));
    return ok;
}

sampling::SampleBatch draw(const RunConfig& c, sampling::RngStream& rng) {
    if (c.model == "fpd") return sampling::sample_fpd(need(c, "alpha"), need(c, "mu"), c.n, rng);
    const inference::Model m = model_of(c);
    if (m.id == "poisson") {
        wpd::FreeParams f;
        f.lambda = m.params[0];
        return sampling::sample_wpd(wpd::make_special_case(wpd::SpecialCase::poisson, f), c.n, rng);
    }
    if (auto tag = wpd::parse_tag(m.id)) return sampling::sample_wpd(wpd::from_free_vector(*tag, m.params), c.n, rng);
    // inverse CDF over the pmf table
    const std::vector<double> p = model_pmf(m, std::nullopt);
    std::vector<double> cdf(p.size());
    std::partial_sum(p.begin(), p.end(), cdf.begin());
    sampling::SampleBatch b;
    for (std::size_t i = 0; i < c.n; ++i) {
        const double u = rng.next_uniform() * cdf.back();
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        b.values.push_back(static_cast<std::uint64_t>(std::min<std::ptrdiff_t>(it - cdf.begin(), cdf.size() - 1)));
    }
    b.n = c.n;
    b.seed = rng.seed();
    return b;
}

int cmd_sample(const RunConfig& c, std::ostream& out, std::ostream& err) {
    if (c.n == 0) throw UsageError("--n must be at least 1");
    sampling::RngStream rng(c.seed);
    const sampling::SampleBatch b = draw(c, rng);
    err << "seed: " << c.seed << "\n";
    if (c.output_format == OutputFormat::json) {
        out << json{{"model", c.model}, {"seed", c.seed}, {"n", b.n}, {"values", b.values}}.dump() << "\n";
        return ok;
    }
    for (std::uint64_t v : b.values) out << v << "\n";
    return ok;
}

json fit_json(const inference::FitResult& r) {
    return json{{"model", r.model_id},
                {"params", params_json(r.param_names, r.params)},
                {"loglik", r.loglik},
                {"chi2", r.chi2},
                {"df", r.df},
                {"p_value", r.p_value},
                {"converged", r.converged}};
}

void emit_fits(const RunConfig& c, const std::vector<inference::CompareRow>& rows, std::ostream& out, bool single) {
    if (c.output_format == OutputFormat::json) {
        json arr = json::array();
        for (const auto& row : rows) {
            json j = fit_json(row.fit);
            if (row.error) {
                j["error"] = *row.error;
                j["loglik"] = nullptr;
                j["chi2"] = nullptr;
                j["df"] = nullptr;
                j["p_value"] = nullptr;
                j["converged"] = false;
            }
            arr.push_back(j);
        }
        out << (single ? arr.at(0) : arr).dump(2) << "\n";
        return;
    }
    if (c.output_format == OutputFormat::csv) {
        out << "model,params,loglik,chi2,df,p_value,converged,error\n";
        for (const auto& row : rows) {
            const auto& f = row.fit;
            out << f.model_id << ",\"" << params_text(f.param_names, f.params) << "\",";
            if (row.error) out << ",,,,false,\"" << *row.error << "\"\n";
            else out << num(f.loglik, 12) << "," << num(f.chi2) << "," << f.df << "," << num(f.p_value) << ","
                     << (f.converged ? "true" : "false") << ",\n";
        }
        return;
    }
    out << std::left << std::setw(24) << "model" << std::setw(44) << "params" << std::right << std::setw(16) << "loglik"
        << std::setw(14) << "chi2" << std::setw(6) << "df" << std::setw(14) << "p_value" << "  converged\n";
    for (const auto& row : rows) {
        const auto& f = row.fit;
        out << std::left << std::setw(24) << f.model_id << std::setw(44) << params_text(f.param_names, f.params)
            << std::right;
        if (row.error) {
            out << "  error: " << *row.error << "\n";
            continue;
        }
        out << std::setw(16) << num(f.loglik, 10) << std::setw(14) << num(f.chi2, 6) << std::setw(6) << f.df
            << std::setw(14) << num(f.p_value, 6) << "  " << (f.converged ? "yes" : "no") << "\n";
    }
}

inference::CountData input_data(const RunConfig& c) {
    if (c.input_path.empty()) throw UsageError(c.command + " needs --input");
    return ingest(c.input_path, c.input_format);
}

int cmd_fit(const RunConfig& c, std::ostream& out) {
    if (!inference::is_model_id(c.model)) throw UsageError("unknown model '" + c.model + "'");
    const inference::CountData d = input_data(c);
    inference::GofOptions gof;
    gof.pool = c.pool;
    inference::FitResult r;
    if (c.method == "default") r = inference::fit_default(c.model, d, gof);
    else if (c.method == "grid") r = inference::fit_grid(c.model, d, inference::default_grid(c.model, d), gof);
    else if (c.method == "simplex")
        r = inference::fit_simplex(c.model, d, c.init.empty() ? inference::default_init(c.model, d) : c.init, {}, gof);
    else throw UsageError("unknown --method '" + c.method + "'");
    emit_fits(c, {inference::CompareRow{r, std::nullopt}}, out, true);
    return ok;
}

int cmd_gof(const RunConfig& c, std::ostream& out) {
    const inference::Model m = model_of(c);
    const inference::CountData d = input_data(c);
    inference::GofOptions gof;
    gof.pool = c.pool;
    const inference::GofResult g = inference::gof_chisq(m, d, gof);
    inference::FitResult r;
    r.model_id = m.id;
    r.param_names = inference::param_names(m.id);
    r.params = m.params;
    r.loglik = inference::loglik(m, d);
    r.chi2 = g.chi2;
    r.df = g.df;
    r.p_value = g.p_value;
    r.converged = true;  // parameters given, nothing to fit
    emit_fits(c, {inference::CompareRow{r, std::nullopt}}, out, true);
    return ok;
}

int cmd_compare(const RunConfig& c, std::ostream& out) {
    if (c.models.size() < 2) throw UsageError("compare needs at least two --models");
    const inference::CountData d = input_data(c);
    inference::GofOptions gof;
    gof.pool = c.pool;
    emit_fits(c, inference::compare(c.models, d, gof), out, false);
    return ok;
}

int cmd_moments(const RunConfig& c, std::ostream& out) {
    countdist::SummaryStats s;
    json params;
    if (is_gfpd_family(c.model)) {
        const countdist::GfpdParams g = gfpd_params(c);
        s = countdist::gfpd_summary(g);
        params = c.model == "gfpd" ? json{{"alpha", g.alpha}, {"beta", g.beta}, {"delta", g.delta}, {"mu", g.mu}}
                                   : json{{"alpha", g.geometric_limit ? 0.0 : g.alpha}, {"mu", g.mu}};
    } else {
        const inference::Model m = model_of(c);
        params = params_json(inference::param_names(m.id), m.params);
        countdist::FactorialMomentSequence a;
        std::optional<wpd::SpecialCase> tag = m.id == "poisson" ? std::optional(wpd::SpecialCase::poisson)
                                                                 : wpd::parse_tag(m.id);
        if (tag) {
            wpd::FreeParams f;
            f.lambda = m.params[0];
            const wpd::WpdParams w =
                m.id == "poisson" ? wpd::make_special_case(*tag, f) : wpd::from_free_vector(*tag, m.params);
            a = wpd::wpd_factorial_moments(w, 3);
        } else {
            const std::vector<double> p = model_pmf(m, std::nullopt);
            a.assign(4, 0.0);
            a[0] = 1.0;
            for (std::size_t x = 0; x < p.size(); ++x) {
                const double xd = static_cast<double>(x);
                a[1] += xd * p[x];
                a[2] += xd * (xd - 1.0) * p[x];
                a[3] += xd * (xd - 1.0) * (xd - 2.0) * p[x];
            }
        }
        s.mean = a[1];
        s.variance = a[2] + a[1] - a[1] * a[1];
        s.skewness = countdist::skewness_from_factorial(a[1], a[2], a[3]);
        s.fisher_index = s.variance / s.mean;
    }
    if (c.output_format == OutputFormat::json) {
        out << json{{"model", c.model},
                    {"params", params},
                    {"mean", s.mean},
                    {"variance", s.variance},
                    {"skewness", s.skewness},
                    {"fisher_index", s.fisher_index}}
                   .dump(2)
            << "\n";
    } else if (c.output_format == OutputFormat::csv) {
        out << "mean,variance,skewness,fisher_index\n"
            << num(s.mean, 15) << "," << num(s.variance, 15) << "," << num(s.skewness, 15) << "," << num(s.fisher_index, 15)
            << "\n";
    } else {
        out << std::left << std::setw(14) << "mean" << num(s.mean, 15) << "\n"
            << std::setw(14) << "variance" << num(s.variance, 15) << "\n"
            << std::setw(14) << "skewness" << num(s.skewness, 15) << "\n"
            << std::setw(14) << "fisher_index" << num(s.fisher_index, 15) << "\n";
    }
    return ok;
}

int report(const RunConfig* c, int code, std::string_view kind, const std::string& msg, std::ostream& out,
           std::ostream& err) {
    err << "countkit: error[" << kind << "]: " << msg << "\n";
    if (c && c->output_format == OutputFormat::json)
        out << json{{"error", {{"code", kind}, {"exit_status", code}, {"message", msg}}}}.dump() << "\n";
    return code;
}

}  // namespace

inference::CountData ingest(std::istream& in, InputFormat format) {
    std::map<std::uint64_t, std::uint64_t> h;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (format == InputFormat::raw) {
            ++h[parse_count(t, lineno, "count")];
            continue;
        }
        const auto comma = t.find(',');
        if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
            throw ParseError(lineno, "expected 'value,frequency', got '" + t + "'");
        const std::uint64_t v = parse_count(trim(std::string_view(t).substr(0, comma)), lineno, "value");
        const std::uint64_t f = parse_count(trim(std::string_view(t).substr(comma + 1)), lineno, "frequency");
        h[v] += f;
    }
    std::uint64_t total = 0;
    for (const auto& [v, f] : h) total += f;
    if (total == 0) throw ParseError(lineno, "no counts in input");
    return inference::CountData::from_histogram(h);
}

inference::CountData ingest(const std::string& path, InputFormat format) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open '" + path + "'");
    return ingest(f, format);
}

int run(const RunConfig& c, std::ostream& out, std::ostream& err) {
    try {
        if (c.command == "pmf") return cmd_pmf(c, out);
        if (c.command == "sample") return cmd_sample(c, out, err);
        if (c.command == "fit") return cmd_fit(c, out);
        if (c.command == "gof") return cmd_gof(c, out);
        if (c.command == "compare") return cmd_compare(c, out);
        if (c.command == "moments") return cmd_moments(c, out);
        throw UsageError("unknown command '" + c.command + "'");
    } catch (const UsageError& e) {
        return report(&c, usage, "usage", e.what(), out, err);
    } catch (const Error& e) {
        const int code = e.code() == ErrorCode::parse        ? parse
                         : e.code() == ErrorCode::domain     ? domain
                         : e.code() == ErrorCode::evaluation ? evaluation
                                                             : io;
        return report(&c, code, error_code_name(e.code()), e.what(), out, err);
    }
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    if (const char* s = std::getenv("COUNTKIT_SEED")) {
        try {
            c.seed = std::stoull(s);
        } catch (const std::exception&) {
            return report(nullptr, usage, "usage", std::string("COUNTKIT_SEED is not an integer: ") + s, out, err);
        }
    }

    CLI::App app{"Fractional and weighted Poisson count models"};
    app.require_subcommand(1);
    std::map<std::string, double> param_store;
    std::string input_format = "raw", output_format = "table";
    std::string init_list, model_list;
    std::uint64_t x_max = 0;
    bool no_pool = false;

    const std::vector<std::string> param_opts = {"alpha", "beta",   "gamma", "nu",      "lambda",  "mu",
                                                 "delta", "size",   "mean",  "lambda1", "lambda2", "xi"};
    auto add_common = [&](CLI::App* sub, bool needs_model) {
        if (needs_model) sub->add_option("--model", c.model, "Model id")->required();
        for (const auto& n : param_opts) sub->add_option("--" + n, param_store[n]);
        sub->add_option("--output", output_format, "table, json or csv")
            ->check(CLI::IsMember({"table", "json", "csv"}));
        sub->add_option("--seed", c.seed, "Random seed (default $COUNTKIT_SEED or built-in)");
        sub->add_option("--mc-n", c.mc_n, "Monte Carlo sample size");
    };
    auto add_input = [&](CLI::App* sub) {
        sub->add_option("--input", c.input_path, "Count data file")->required();
        sub->add_option("--format", input_format, "raw (one count per line) or histogram (value,frequency)")
            ->check(CLI::IsMember({"raw", "histogram"}));
        sub->add_flag("--no-pool", no_pool, "Use raw cells for the chi-square test");
    };

    CLI::App* pmf = app.add_subcommand("pmf", "Probability mass function table");
    add_common(pmf, true);
    pmf->add_option("--x-max", x_max, "Last value of the table");
    CLI::App* sample = app.add_subcommand("sample", "Draw random counts");
    add_common(sample, true);
    sample->add_option("--n", c.n, "Number of draws");
    CLI::App* fit = app.add_subcommand("fit", "Maximum likelihood fit");
    add_common(fit, true);
    add_input(fit);
    fit->add_option("--method", c.method, "default, grid or simplex")
        ->check(CLI::IsMember({"default", "grid", "simplex"}));
    fit->add_option("--init", init_list, "Comma-separated simplex start");
    CLI::App* gof = app.add_subcommand("gof", "Chi-square goodness of fit at given parameters");
    add_common(gof, true);
    add_input(gof);
    CLI::App* cmp = app.add_subcommand("compare", "Fit several models and rank by p-value");
    add_common(cmp, false);
    add_input(cmp);
    cmp->add_option("--models", model_list, "Comma-separated model ids")->required();
    CLI::App* mom = app.add_subcommand("moments", "Mean, variance, skewness and Fisher index");
    add_common(mom, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e, out, err);
        return rc == 0 ? ok : usage;
    }

    for (CLI::App* sub : app.get_subcommands()) {
        c.command = sub->get_name();
        for (const auto& n : param_opts)
            if (sub->count("--" + n)) c.params[n] = param_store[n];
        if (c.command == "pmf" && sub->count("--x-max")) c.x_max = x_max;
    }
    c.input_format = input_format == "histogram" ? InputFormat::histogram : InputFormat::raw;
    c.output_format = output_format == "json" ? OutputFormat::json
                      : output_format == "csv" ? OutputFormat::csv
                                               : OutputFormat::table;
    c.pool = !no_pool;
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ','))
            if (!trim(tok).empty()) out.push_back(trim(tok));
        return out;
    };
    c.models = split(model_list);
    for (const auto& tok : split(init_list)) {
        try {
            std::size_t pos = 0;
            c.init.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            return report(&c, usage, "usage", "--init: not a number '" + tok + "'", out, err);
        }
    }
    return run(c, out, err);
}

}  // namespace countkit::cli
