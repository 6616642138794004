#include <immintrin.h>

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "netact/kernels/kernels.hpp"

namespace netact::kernels {

namespace {
// Sentinel standing in for +infinity in int32 cells. dtw_avx2_applicable
// guarantees sentinel + any local cost never wraps.
constexpr int32_t kInf32 = 1 << 29;
}  // namespace

// Wavefront formulation: cells on anti-diagonal d = i + j depend only on
// diagonals d-1 and d-2, so a diagonal's interior is computed 8 cells at a
// time. Buffers are indexed by row i; y is pre-reversed so both series are
// read with ascending indices within a diagonal.
int64_t dtw_cost_avx2(std::span<const int32_t> x, std::span<const int32_t> y) {
    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(y.size());

    std::vector<int32_t> yrev(static_cast<size_t>(m));
    for (int t = 0; t < m; ++t) yrev[static_cast<size_t>(t)] = y[static_cast<size_t>(m - 1 - t)];

    std::vector<int32_t> buf0(static_cast<size_t>(n) + 1, kInf32);
    std::vector<int32_t> buf1(static_cast<size_t>(n) + 1, kInf32);
    std::vector<int32_t> buf2(static_cast<size_t>(n) + 1, kInf32);
    int32_t* prev2 = buf0.data();
    int32_t* prev = buf1.data();
    int32_t* cur = buf2.data();
    cur[0] = 0;  // D(0,0)

    for (int d = 1; d <= n + m; ++d) {
        int32_t* recycled = prev2;
        prev2 = prev;
        prev = cur;
        cur = recycled;

        // Interior cells have i >= 1 and j = d - i >= 1.
        const int istart = std::max(1, d - m);
        const int iend = std::min(n, d - 1);
        const int32_t* xs = x.data() + (istart - 1);
        const int32_t* ys = yrev.data() + (m - d + istart);

        int i = istart;
        for (; i + 7 <= iend; i += 8) {
            const int off = i - istart;
            __m256i xa = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(xs + off));
            __m256i yb = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(ys + off));
            __m256i cost = _mm256_abs_epi32(_mm256_sub_epi32(xa, yb));
            __m256i up = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev + i));
            __m256i left = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev + i - 1));
            __m256i diag = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(prev2 + i - 1));
            __m256i best = _mm256_min_epi32(_mm256_min_epi32(up, left), diag);
            _mm256_storeu_si256(reinterpret_cast<__m256i*>(cur + i),
                                _mm256_add_epi32(cost, best));
        }
        for (; i <= iend; ++i) {
            int32_t cost = std::abs(x[static_cast<size_t>(i - 1)] -
                                    yrev[static_cast<size_t>(m - d + i)]);
            cur[i] = cost + std::min({prev[i], prev[i - 1], prev2[i - 1]});
        }

        if (d <= m) cur[0] = kInf32;  // D(0,d)
        if (d <= n) cur[d] = kInf32;  // D(d,0)
    }
    return cur[n];
}

void merge_linkage_rows_avx2(std::span<double> out, std::span<const double> u,
                             std::span<const double> v, double size_u, double size_v) {
    const double total = size_u + size_v;
    const __m256d vsu = _mm256_set1_pd(size_u);
    const __m256d vsv = _mm256_set1_pd(size_v);
    const __m256d vtotal = _mm256_set1_pd(total);

    size_t i = 0;
    const size_t n = out.size();
    for (; i + 4 <= n; i += 4) {
        __m256d a = _mm256_loadu_pd(u.data() + i);
        __m256d b = _mm256_loadu_pd(v.data() + i);
        __m256d num = _mm256_add_pd(_mm256_mul_pd(vsu, a), _mm256_mul_pd(vsv, b));
        _mm256_storeu_pd(out.data() + i, _mm256_div_pd(num, vtotal));
    }
    for (; i < n; ++i) {
        out[i] = (size_u * u[i] + size_v * v[i]) / total;
    }
}

}  // namespace netact::kernels
