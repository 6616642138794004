#include "netact/series.hpp"

#include "netact/errors.hpp"

namespace netact {

const char* series_type_name(SeriesType type) {
    switch (type) {
        case SeriesType::Incoming: return "incoming";
        case SeriesType::Outgoing: return "outgoing";
        case SeriesType::Complete: return "complete";
    }
    return "?";
}

SeriesType parse_series_type(const std::string& name) {
    if (name == "incoming") return SeriesType::Incoming;
    if (name == "outgoing") return SeriesType::Outgoing;
    if (name == "complete") return SeriesType::Complete;
    throw ConfigError("unknown series type '" + name + "'");
}

ByteSeries to_series(const Flow& flow, SeriesType type) {
    ByteSeries out;
    out.reserve(flow.packets.size());
    for (const auto& p : flow.packets) {
        bool outgoing = flow.outgoing(p);
        auto size = static_cast<int32_t>(p.size);
        switch (type) {
            case SeriesType::Incoming:
                if (!outgoing) out.push_back(size);
                break;
            case SeriesType::Outgoing:
                if (outgoing) out.push_back(size);
                break;
            case SeriesType::Complete:
                out.push_back(outgoing ? size : -size);
                break;
        }
    }
    return out;
}

ByteSeries slice_interval(const ByteSeries& series, Interval interval) {
    if (interval.x < 1 || interval.y < interval.x)
        throw ConfigError("bad interval [" + std::to_string(interval.x) + "," +
                          std::to_string(interval.y) + "]");
    auto len = static_cast<int>(series.size());
    if (interval.x > len) return {};
    int last = std::min(interval.y, len);
    return ByteSeries(series.begin() + (interval.x - 1), series.begin() + last);
}

}  // namespace netact
