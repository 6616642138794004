#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netact/packet.hpp"

namespace netact {

enum class SeriesType : uint8_t { Incoming, Outgoing, Complete };

const char* series_type_name(SeriesType type);
SeriesType parse_series_type(const std::string& name);

/// 1-based inclusive packet index range [x, y].
struct Interval {
    int x = 1;
    int y = 1;

    bool operator==(const Interval&) const = default;
};

/// Per-packet byte values of a flow. Incoming/Outgoing series are strictly
/// positive; the Complete series is signed, negative = incoming.
using ByteSeries = std::vector<int32_t>;

/// Decompose a flow into one of its three byte time series. Packets are taken
/// in time order; sizes are the captured frame lengths. A flow with no packet
/// in the requested direction yields an empty series.
ByteSeries to_series(const Flow& flow, SeriesType type);

/// Elements x..y of the series (1-based, inclusive). A series shorter than y
/// yields the truncated tail x..len; x beyond the series yields empty.
ByteSeries slice_interval(const ByteSeries& series, Interval interval);

}  // namespace netact
