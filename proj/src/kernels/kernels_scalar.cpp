#include <algorithm>
#include <cstdlib>
#include <vector>

#include "netact/kernels/kernels.hpp"

namespace netact::kernels {

// Reference implementation: rolling two-row dynamic program over the cost
// matrix, 64-bit cells. D(i,j) = |x_i - y_j| + min(D(i-1,j), D(i,j-1), D(i-1,j-1)).
int64_t dtw_cost_scalar(std::span<const int32_t> x, std::span<const int32_t> y) {
    const size_t n = x.size();
    const size_t m = y.size();
    constexpr int64_t kInf = INT64_MAX / 4;

    std::vector<int64_t> prev(m + 1, kInf);
    std::vector<int64_t> cur(m + 1, kInf);
    prev[0] = 0;

    for (size_t i = 1; i <= n; ++i) {
        cur[0] = kInf;
        for (size_t j = 1; j <= m; ++j) {
            int64_t cost = std::abs(static_cast<int64_t>(x[i - 1]) - y[j - 1]);
            cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

void merge_linkage_rows_scalar(std::span<double> out, std::span<const double> u,
                               std::span<const double> v, double size_u, double size_v) {
    const double total = size_u + size_v;
    for (size_t i = 0; i < out.size(); ++i) {
        out[i] = (size_u * u[i] + size_v * v[i]) / total;
    }
}

}  // namespace netact::kernels
