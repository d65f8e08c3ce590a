#include <algorithm>
#include <cmath>
#include <string>

#include "countkit/error.hpp"
#include "countkit/inference.hpp"
#include "countkit/specfun.hpp"

namespace countkit::inference {

GofResult gof_chisq(const Model& m, const CountData& data, const GofOptions& opt) {
    const std::uint64_t K = data.max_value();
    const std::vector<double> lp = log_pmf_table(m, K);
    const double n = static_cast<double>(data.n_total);

    // Cells 0, 1, ..., K-1 and the right tail {x >= K}.
    GofResult g;
    double below = 0.0;
    for (std::uint64_t x = 0; x <= K; ++x) {
        g.cell_lo.push_back(x);
        const auto it = data.histogram.find(x);
        g.observed.push_back(it == data.histogram.end() ? 0.0 : static_cast<double>(it->second));
        if (x < K) {
            const double p = std::exp(lp[x]);
            below += p;
            g.expected.push_back(n * p);
        } else {
            g.expected.push_back(n * std::max(0.0, 1.0 - below));
        }
    }

    auto merge = [&](std::size_t i) {  // cell i+1 into cell i
        g.observed[i] += g.observed[i + 1];
        g.expected[i] += g.expected[i + 1];
        g.observed.erase(g.observed.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        g.expected.erase(g.expected.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        g.cell_lo.erase(g.cell_lo.begin() + static_cast<std::ptrdiff_t>(i) + 1);
    };
    if (opt.pool) {
        const double t = opt.min_expected;
        while (g.expected.size() > 1 && g.expected.front() < t) merge(0);
        while (g.expected.size() > 1 && g.expected.back() < t) merge(g.expected.size() - 2);
        for (;;) {
            std::size_t low = g.expected.size();
            for (std::size_t i = 0; i < g.expected.size(); ++i)
                if (g.expected[i] < t && (low == g.expected.size() || g.expected[i] < g.expected[low])) low = i;
            if (low == g.expected.size() || g.expected.size() == 1) break;
            if (low == 0) merge(0);
            else if (low + 1 == g.expected.size() || g.expected[low - 1] <= g.expected[low + 1]) merge(low - 1);
            else merge(low);
        }
    }

    const std::size_t free = n_free_params(m.id);
    if (g.expected.size() < free + 2)
        throw DomainError("gof_chisq: " + std::to_string(g.expected.size()) + " cells leave no degrees of freedom for " +
                          std::to_string(free) + " fitted parameters");
    g.chi2 = 0.0;
    for (std::size_t i = 0; i < g.expected.size(); ++i) {
        const double d = g.observed[i] - g.expected[i];
        if (g.expected[i] > 0.0) g.chi2 += d * d / g.expected[i];
        else if (g.observed[i] > 0.0) g.chi2 = INFINITY;
    }
    g.df = g.expected.size() - 1 - free;
    g.p_value = specfun::chi2_sf(g.chi2, static_cast<double>(g.df));
    return g;
}

}  // namespace countkit::inference
