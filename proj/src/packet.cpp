#include "netact/packet.hpp"

#include <array>
#include <charconv>

#include "netact/errors.hpp"

namespace netact {

uint32_t parse_ipv4(const std::string& text) {
    uint32_t out = 0;
    size_t pos = 0;
    for (int octet = 0; octet < 4; ++octet) {
        if (pos >= text.size()) throw ParseError("bad IPv4 address '" + text + "'");
        uint32_t value = 0;
        auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), value);
        if (ec != std::errc() || value > 255) throw ParseError("bad IPv4 address '" + text + "'");
        pos = static_cast<size_t>(ptr - text.data());
        if (octet < 3) {
            if (pos >= text.size() || text[pos] != '.')
                throw ParseError("bad IPv4 address '" + text + "'");
            ++pos;
        }
        out = (out << 8) | value;
    }
    if (pos != text.size()) throw ParseError("bad IPv4 address '" + text + "'");
    return out;
}

std::string format_ipv4(uint32_t ip) {
    return std::to_string((ip >> 24) & 0xff) + '.' + std::to_string((ip >> 16) & 0xff) + '.' +
           std::to_string((ip >> 8) & 0xff) + '.' + std::to_string(ip & 0xff);
}

namespace {

constexpr std::array<std::pair<const char*, uint8_t>, 5> kFlagNames = {{
    {"SYN", flag::kSyn},
    {"ACK", flag::kAck},
    {"FIN", flag::kFin},
    {"RST", flag::kRst},
    {"PSH", flag::kPsh},
}};

}  // namespace

uint8_t parse_flags(const std::string& text) {
    uint8_t out = 0;
    size_t pos = 0;
    while (pos < text.size()) {
        size_t bar = text.find('|', pos);
        std::string name = text.substr(pos, bar == std::string::npos ? bar : bar - pos);
        bool known = false;
        for (const auto& [flag_name, bit] : kFlagNames) {
            if (name == flag_name) {
                out |= bit;
                known = true;
                break;
            }
        }
        if (!known) throw ParseError("unknown TCP flag '" + name + "'");
        if (bar == std::string::npos) break;
        pos = bar + 1;
    }
    return out;
}

std::string format_flags(uint8_t flags) {
    std::string out;
    for (const auto& [flag_name, bit] : kFlagNames) {
        if (flags & bit) {
            if (!out.empty()) out += '|';
            out += flag_name;
        }
    }
    return out;
}

std::string format_flow_key(const FlowKey& key) {
    return format_ipv4(key.client_ip) + ':' + std::to_string(key.client_port) + '-' +
           format_ipv4(key.server_ip) + ':' + std::to_string(key.server_port);
}

FlowKey parse_flow_key(const std::string& text) {
    size_t dash = text.find('-');
    if (dash == std::string::npos) throw ParseError("bad flow key '" + text + "'");
    auto parse_endpoint = [&](const std::string& part, uint32_t& ip, uint16_t& port) {
        size_t colon = part.rfind(':');
        if (colon == std::string::npos) throw ParseError("bad flow key '" + text + "'");
        ip = parse_ipv4(part.substr(0, colon));
        uint32_t p = 0;
        std::string port_text = part.substr(colon + 1);
        auto [ptr, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), p);
        if (ec != std::errc() || ptr != port_text.data() + port_text.size() || p > 65535)
            throw ParseError("bad port in flow key '" + text + "'");
        port = static_cast<uint16_t>(p);
    };
    FlowKey key;
    parse_endpoint(text.substr(0, dash), key.client_ip, key.client_port);
    parse_endpoint(text.substr(dash + 1), key.server_ip, key.server_port);
    return key;
}

}  // namespace netact
