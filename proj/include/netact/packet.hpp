#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace netact {

// TCP flag bitmask. Only the flags the pipeline inspects are modeled.
namespace flag {
constexpr uint8_t kSyn = 0x01;
constexpr uint8_t kAck = 0x02;
constexpr uint8_t kFin = 0x04;
constexpr uint8_t kRst = 0x08;
constexpr uint8_t kPsh = 0x10;
}  // namespace flag

enum class Protocol : uint8_t { Tcp, Other };

/// Parse a dotted-quad IPv4 address into host byte order. Throws ParseError.
uint32_t parse_ipv4(const std::string& text);

/// Format a host-order IPv4 address as dotted quad.
std::string format_ipv4(uint32_t ip);

/// Parse a `|`-joined flag list such as "SYN|ACK". Empty string means no flags.
uint8_t parse_flags(const std::string& text);

/// Format a flag bitmask back to the `|`-joined form, in SYN,ACK,FIN,RST,PSH order.
std::string format_flags(uint8_t flags);

/// Metadata of one captured packet. `size` is the whole captured frame in
/// bytes; `payload_len` is the TCP payload portion only.
struct PacketRecord {
    double timestamp = 0.0;  // seconds since Unix epoch
    uint32_t src_ip = 0;
    uint32_t dst_ip = 0;
    uint16_t src_port = 0;
    uint16_t dst_port = 0;
    Protocol protocol = Protocol::Tcp;
    uint32_t size = 0;
    uint8_t flags = 0;
    uint32_t seq = 0;
    uint32_t payload_len = 0;

    bool has_flag(uint8_t f) const { return (flags & f) != 0; }
    bool pure_ack() const { return has_flag(flag::kAck) && payload_len == 0; }
};

/// Endpoint pair identifying a TCP session, oriented so the configured
/// device is always the client side.
struct FlowKey {
    uint32_t client_ip = 0;
    uint16_t client_port = 0;
    uint32_t server_ip = 0;
    uint16_t server_port = 0;

    auto operator<=>(const FlowKey&) const = default;
};

/// Serialize a flow key as `client_ip:client_port-server_ip:server_port`.
std::string format_flow_key(const FlowKey& key);
FlowKey parse_flow_key(const std::string& text);

/// Time-ordered packet sequence for one TCP session segment.
struct Flow {
    FlowKey key;
    std::vector<PacketRecord> packets;
    double start_time = 0.0;
    double end_time = 0.0;
    std::optional<std::string> label;    // action name, for training data
    std::optional<std::string> account;  // account id, for training data

    bool outgoing(const PacketRecord& p) const {
        return p.src_ip == key.client_ip && p.src_port == key.client_port;
    }
    void refresh_times() {
        if (!packets.empty()) {
            start_time = packets.front().timestamp;
            end_time = packets.back().timestamp;
        }
    }
};

struct DeviceConfig {
    uint32_t device_ip = 0;
    double timeout_seconds = 4.5;  // inactivity gap that terminates a flow
};

}  // namespace netact
