#include <algorithm>
#include <atomic>
#include <cstdlib>

#include "netact/errors.hpp"
#include "netact/kernels/kernels.hpp"

namespace netact::kernels {

namespace {

// Below this length a DTW's diagonals are too short to fill SIMD lanes.
constexpr size_t kSimdMinLen = 16;

Backend detect_backend() {
#if defined(NETACT_HAVE_AVX2) && defined(__x86_64__)
    if (__builtin_cpu_supports("avx2")) return Backend::Avx2;
#endif
    return Backend::Scalar;
}

std::atomic<Backend>& backend_state() {
    static std::atomic<Backend> state{detect_backend()};
    return state;
}

}  // namespace

const char* backend_name(Backend backend) {
    switch (backend) {
        case Backend::Scalar: return "scalar";
        case Backend::Avx2: return "avx2";
    }
    return "?";
}

bool backend_available(Backend backend) {
    if (backend == Backend::Scalar) return true;
#if defined(NETACT_HAVE_AVX2) && defined(__x86_64__)
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend active_backend() { return backend_state().load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
    if (!backend_available(backend))
        throw ModelError(std::string("kernel backend '") + backend_name(backend) +
                         "' is not available on this machine");
    backend_state().store(backend, std::memory_order_relaxed);
}

bool dtw_avx2_applicable(std::span<const int32_t> x, std::span<const int32_t> y) {
    if (x.empty() || y.empty()) return false;
    int64_t max_x = 0;
    for (int32_t v : x) max_x = std::max<int64_t>(max_x, std::abs(static_cast<int64_t>(v)));
    int64_t max_y = 0;
    for (int32_t v : y) max_y = std::max<int64_t>(max_y, std::abs(static_cast<int64_t>(v)));
    // Worst-case path cost must stay clear of the int32 infinity sentinel.
    int64_t bound = (max_x + max_y) * static_cast<int64_t>(x.size() + y.size());
    return bound < (1 << 29);
}

int64_t dtw_cost(std::span<const int32_t> x, std::span<const int32_t> y) {
#if defined(NETACT_HAVE_AVX2)
    if (active_backend() == Backend::Avx2 && std::min(x.size(), y.size()) >= kSimdMinLen &&
        dtw_avx2_applicable(x, y)) {
        return dtw_cost_avx2(x, y);
    }
#endif
    return dtw_cost_scalar(x, y);
}

void merge_linkage_rows(std::span<double> out, std::span<const double> u,
                        std::span<const double> v, double size_u, double size_v) {
#if defined(NETACT_HAVE_AVX2)
    if (active_backend() == Backend::Avx2) {
        merge_linkage_rows_avx2(out, u, v, size_u, size_v);
        return;
    }
#endif
    merge_linkage_rows_scalar(out, u, v, size_u, size_v);
}

}  // namespace netact::kernels
