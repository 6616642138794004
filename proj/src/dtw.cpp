#include "netact/dtw.hpp"

#include <cstdlib>

#include "netact/kernels/kernels.hpp"

namespace netact {

int64_t dtw_cost(const ByteSeries& x, const ByteSeries& y) {
    if (x.empty() && y.empty()) return 0;
    if (x.empty() || y.empty()) {
        const ByteSeries& s = x.empty() ? y : x;
        int64_t total = 0;
        for (int32_t v : s) total += std::abs(static_cast<int64_t>(v));
        return total;
    }
    return kernels::dtw_cost(x, y);
}

}  // namespace netact
