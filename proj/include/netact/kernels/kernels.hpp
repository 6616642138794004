#pragma once

#include <cstdint>
#include <span>

namespace netact::kernels {

enum class Backend : uint8_t { Scalar, Avx2 };

const char* backend_name(Backend backend);

/// True when the backend was compiled in and the CPU supports it.
bool backend_available(Backend backend);

/// Backend used by the dispatching entry points. Defaults to the widest
/// available one, detected once at startup.
Backend active_backend();

/// Force a backend (throws ModelError if unavailable). Mainly for tests and
/// the CLI's --backend flag.
void set_backend(Backend backend);

// ---------------------------------------------------------------------------
// Dynamic-time-warping cost: minimal total |a-b| alignment cost between two
// non-empty integer series under the boundary/monotonicity/step conditions.
// All variants return exactly the same integer.
// ---------------------------------------------------------------------------

int64_t dtw_cost(std::span<const int32_t> x, std::span<const int32_t> y);

int64_t dtw_cost_scalar(std::span<const int32_t> x, std::span<const int32_t> y);

#if defined(NETACT_HAVE_AVX2)
// Anti-diagonal (wavefront) formulation, 8 int32 cells per step. Requires
// dtw_avx2_applicable; the dispatcher checks it and falls back to scalar.
int64_t dtw_cost_avx2(std::span<const int32_t> x, std::span<const int32_t> y);
#endif

/// Whether the AVX2 path's int32 cell arithmetic cannot overflow for these
/// inputs (worst-case path cost must stay below the internal sentinel).
bool dtw_avx2_applicable(std::span<const int32_t> x, std::span<const int32_t> y);

// ---------------------------------------------------------------------------
// Average-linkage row merge (Lance-Williams update):
//   out[i] = (size_u * u[i] + size_v * v[i]) / (size_u + size_v)
// Element-wise, so scalar and SIMD variants produce bit-identical doubles.
// ---------------------------------------------------------------------------

void merge_linkage_rows(std::span<double> out, std::span<const double> u,
                        std::span<const double> v, double size_u, double size_v);

void merge_linkage_rows_scalar(std::span<double> out, std::span<const double> u,
                               std::span<const double> v, double size_u, double size_v);

#if defined(NETACT_HAVE_AVX2)
void merge_linkage_rows_avx2(std::span<double> out, std::span<const double> u,
                             std::span<const double> v, double size_u, double size_v);
#endif

}  // namespace netact::kernels
