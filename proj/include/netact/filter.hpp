#pragma once

#include "netact/packet.hpp"

namespace netact {

/// Remove packets that hinder flow similarity: SYN/FIN/RST-flagged packets
/// (handshake and teardown), pure ACKs (ACK flag with zero payload), and
/// retransmissions, i.e. packets repeating an earlier surviving packet's
/// (direction, seq, payload_len). Surviving packets keep their order; the
/// result may be empty. Idempotent.
Flow packet_filter(Flow flow);

/// Apply packet_filter across flows and drop the ones it empties.
std::vector<Flow> packet_filter_all(std::vector<Flow> flows);

}  // namespace netact
