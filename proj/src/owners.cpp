#include "netact/owners.hpp"

#include <charconv>

#include "netact/errors.hpp"

namespace netact {

void OwnerMap::add(const std::string& cidr, const std::string& owner) {
    size_t slash = cidr.find('/');
    if (slash == std::string::npos) throw ConfigError("bad CIDR '" + cidr + "', missing '/'");
    uint32_t base = parse_ipv4(cidr.substr(0, slash));
    std::string len_text = cidr.substr(slash + 1);
    int len = -1;
    auto [ptr, ec] = std::from_chars(len_text.data(), len_text.data() + len_text.size(), len);
    if (ec != std::errc() || ptr != len_text.data() + len_text.size() || len < 0 || len > 32)
        throw ConfigError("bad prefix length in '" + cidr + "'");
    uint32_t mask = (len == 0) ? 0 : (0xffffffffu << (32 - len));
    entries.push_back(Entry{base & mask, len, owner});
}

OwnerMap OwnerMap::parse(std::string_view text) {
    OwnerMap map;
    size_t pos = 0;
    size_t line_no = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line(text.substr(pos, eol == std::string_view::npos ? eol : eol - pos));
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw ConfigError("owner map line " + std::to_string(line_no) +
                              ": expected 'CIDR,owner'");
        map.add(line.substr(0, comma), line.substr(comma + 1));
    }
    return map;
}

std::optional<std::string> OwnerMap::lookup(uint32_t ip) const {
    const Entry* best = nullptr;
    for (const auto& e : entries) {
        uint32_t mask = (e.prefix_len == 0) ? 0 : (0xffffffffu << (32 - e.prefix_len));
        if ((ip & mask) == e.prefix) {
            if (!best || e.prefix_len > best->prefix_len) best = &e;
        }
    }
    if (!best) return std::nullopt;
    return best->owner;
}

std::string OwnerMap::to_text() const {
    std::string out;
    for (const auto& e : entries) {
        out += format_ipv4(e.prefix);
        out += '/';
        out += std::to_string(e.prefix_len);
        out += ',';
        out += e.owner;
        out += '\n';
    }
    return out;
}

DomainFilterResult domain_filter(std::vector<Flow> flows, const OwnerMap& owners) {
    DomainFilterResult result;
    for (auto& flow : flows) {
        auto owner = owners.lookup(flow.key.server_ip);
        if (owner && owners.target_owners.count(*owner)) {
            result.flows.push_back(std::move(flow));
        } else {
            ++result.dropped;
        }
    }
    return result;
}

}  // namespace netact
