#pragma once

#include <cstdint>

#include "netact/series.hpp"

namespace netact {

/// Total cost of an optimal warping path between two byte series, with local
/// cost |a - b|. Symmetric, non-negative, zero for identical inputs.
///
/// Empty-series convention: both empty -> 0; exactly one empty -> the sum of
/// absolute values of the non-empty series (each element matched against an
/// implicit zero). This keeps interval-sliced short flows comparable.
int64_t dtw_cost(const ByteSeries& x, const ByteSeries& y);

}  // namespace netact
