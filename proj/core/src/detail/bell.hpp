#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace countkit::detail {

// Partial exponential Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}) by
// B_{m,j} = sum_{i=1}^{m-j+1} C(m-1, i-1) x_i B_{m-i,j-1}.
// Only entries with m - j <= n - k are needed. x[0] is x_1.
template <class T>
T bell_partial_impl(std::size_t n, std::size_t k, std::span<const T> x) {
    if (k > n) return T(0);
    if (n == 0) return T(1);
    if (k == 0) return T(0);
    const std::size_t span_len = n - k;
    std::vector<std::vector<T>> binom(n + 1);
    for (std::size_t m = 0; m <= n; ++m) {
        binom[m].assign(m + 1, T(1));
        for (std::size_t i = 1; i < m; ++i) binom[m][i] = binom[m - 1][i - 1] + binom[m - 1][i];
    }
    // b[m][j], stored densely; entries outside the band stay zero.
    std::vector<std::vector<T>> b(n + 1, std::vector<T>(k + 1, T(0)));
    b[0][0] = T(1);
    for (std::size_t j = 1; j <= k; ++j) {
        for (std::size_t m = j; m <= j + span_len && m <= n; ++m) {
            T acc = T(0);
            for (std::size_t i = 1; i + j <= m + 1; ++i) acc += binom[m - 1][i - 1] * x[i - 1] * b[m - i][j - 1];
            b[m][j] = acc;
        }
    }
    return b[n][k];
}

}  // namespace countkit::detail
