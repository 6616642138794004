#include "netact/flows.hpp"

#include <algorithm>
#include <map>

namespace netact {

AssemblyResult assemble_flows(std::vector<PacketRecord> packets, const DeviceConfig& cfg) {
    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });

    AssemblyResult result;
    std::map<FlowKey, Flow> open;  // ordered so flushing is deterministic

    auto flush = [&](Flow&& flow) {
        flow.refresh_times();
        result.flows.push_back(std::move(flow));
    };

    for (const auto& p : packets) {
        if (p.protocol != Protocol::Tcp) {
            ++result.dropped_non_tcp;
            continue;
        }
        FlowKey key;
        if (p.src_ip == cfg.device_ip) {
            key = FlowKey{p.src_ip, p.src_port, p.dst_ip, p.dst_port};
        } else if (p.dst_ip == cfg.device_ip) {
            key = FlowKey{p.dst_ip, p.dst_port, p.src_ip, p.src_port};
        } else {
            ++result.dropped_foreign;
            continue;
        }

        auto it = open.find(key);
        if (it != open.end() &&
            p.timestamp - it->second.packets.back().timestamp > cfg.timeout_seconds) {
            flush(std::move(it->second));
            open.erase(it);
            it = open.end();
        }
        if (it == open.end()) {
            Flow flow;
            flow.key = key;
            it = open.emplace(key, std::move(flow)).first;
        }
        it->second.packets.push_back(p);
    }

    for (auto& [key, flow] : open) flush(std::move(flow));

    std::stable_sort(result.flows.begin(), result.flows.end(), [](const Flow& a, const Flow& b) {
        if (a.start_time != b.start_time) return a.start_time < b.start_time;
        return a.key < b.key;
    });
    return result;
}

}  // namespace netact
