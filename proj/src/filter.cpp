#include "netact/filter.hpp"

#include <set>
#include <tuple>

namespace netact {

Flow packet_filter(Flow flow) {
    std::vector<PacketRecord> kept;
    kept.reserve(flow.packets.size());
    // (outgoing?, seq, payload_len) of packets kept so far, per direction
    std::set<std::tuple<bool, uint32_t, uint32_t>> seen;

    for (const auto& p : flow.packets) {
        if (p.has_flag(flag::kSyn) || p.has_flag(flag::kFin) || p.has_flag(flag::kRst)) continue;
        if (p.pure_ack()) continue;
        auto sig = std::make_tuple(flow.outgoing(p), p.seq, p.payload_len);
        if (!seen.insert(sig).second) continue;  // retransmission
        kept.push_back(p);
    }

    flow.packets = std::move(kept);
    flow.refresh_times();
    return flow;
}

std::vector<Flow> packet_filter_all(std::vector<Flow> flows) {
    std::vector<Flow> out;
    out.reserve(flows.size());
    for (auto& flow : flows) {
        Flow filtered = packet_filter(std::move(flow));
        if (!filtered.packets.empty()) out.push_back(std::move(filtered));
    }
    return out;
}

}  // namespace netact
