#pragma once

#include <vector>

#include "netact/packet.hpp"

namespace netact {

struct AssemblyResult {
    std::vector<Flow> flows;
    size_t dropped_foreign = 0;  // packets touching neither side of the device
    size_t dropped_non_tcp = 0;
};

/// Group packets into flows keyed by (client, server) endpoint pair and split
/// each key's stream whenever the gap between consecutive packets exceeds
/// cfg.timeout_seconds. Packets are stable-sorted by timestamp first, so ties
/// keep file order. Non-TCP packets and packets that do not involve
/// cfg.device_ip are dropped and counted.
AssemblyResult assemble_flows(std::vector<PacketRecord> packets, const DeviceConfig& cfg);

}  // namespace netact
