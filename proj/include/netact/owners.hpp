#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "netact/packet.hpp"

namespace netact {

/// Offline replacement for a WHOIS lookup: CIDR prefixes mapped to owner
/// names, queried by longest-prefix match.
struct OwnerMap {
    struct Entry {
        uint32_t prefix = 0;  // host byte order, low bits zeroed
        int prefix_len = 0;   // 0..32
        std::string owner;
    };

    std::vector<Entry> entries;
    std::set<std::string> target_owners;

    /// Parse lines of the form `CIDR,owner`. '#' starts a comment.
    static OwnerMap parse(std::string_view text);

    void add(const std::string& cidr, const std::string& owner);

    /// Owner of the longest matching prefix, if any.
    std::optional<std::string> lookup(uint32_t ip) const;

    std::string to_text() const;
};

struct DomainFilterResult {
    std::vector<Flow> flows;
    size_t dropped = 0;
};

/// Keep exactly the flows whose server address resolves to one of the target
/// owners; order preserved, everything else dropped and counted.
DomainFilterResult domain_filter(std::vector<Flow> flows, const OwnerMap& owners);

}  // namespace netact
