#include "netact/capture_csv.hpp"

#include <charconv>
#include <cstdio>

#include "netact/errors.hpp"

namespace netact {

namespace {

using Column = CsvSchema::Column;

const char* column_name(Column c) {
    switch (c) {
        case Column::Timestamp: return "timestamp";
        case Column::SrcIp: return "src_ip";
        case Column::SrcPort: return "src_port";
        case Column::DstIp: return "dst_ip";
        case Column::DstPort: return "dst_port";
        case Column::Protocol: return "protocol";
        case Column::Size: return "size";
        case Column::Flags: return "flags";
        case Column::Seq: return "seq";
        case Column::PayloadLen: return "payload_len";
    }
    return "?";
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    size_t pos = 0;
    for (;;) {
        size_t comma = line.find(',', pos);
        if (comma == std::string_view::npos) {
            fields.emplace_back(line.substr(pos));
            break;
        }
        fields.emplace_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

uint64_t parse_uint(const std::string& text, size_t line, const char* what, uint64_t max) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(line, std::string("bad ") + what + " '" + text + "'");
    if (value > max)
        throw ParseError(line, std::string(what) + " out of range: '" + text + "'");
    return value;
}

double parse_timestamp(const std::string& text, size_t line) {
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ParseError(line, "bad timestamp '" + text + "'");
    if (value < 0.0) throw ParseError(line, "negative timestamp '" + text + "'");
    return value;
}

}  // namespace

CsvSchema CsvSchema::default_schema() {
    return CsvSchema{{Column::Timestamp, Column::SrcIp, Column::SrcPort, Column::DstIp,
                      Column::DstPort, Column::Protocol, Column::Size, Column::Flags, Column::Seq,
                      Column::PayloadLen}};
}

CsvSchema CsvSchema::from_names(const std::vector<std::string>& names) {
    CsvSchema schema;
    uint32_t seen = 0;
    for (const auto& name : names) {
        bool matched = false;
        for (int c = 0; c <= static_cast<int>(Column::PayloadLen); ++c) {
            if (name == column_name(static_cast<Column>(c))) {
                if (seen & (1u << c)) throw ConfigError("duplicate CSV column '" + name + "'");
                seen |= 1u << c;
                schema.order.push_back(static_cast<Column>(c));
                matched = true;
                break;
            }
        }
        if (!matched) throw ConfigError("unknown CSV column '" + name + "'");
    }
    if (schema.order.size() != 10) throw ConfigError("CSV schema must list all 10 columns");
    return schema;
}

std::string CsvSchema::header_line() const {
    std::string out;
    for (size_t i = 0; i < order.size(); ++i) {
        if (i) out += ',';
        out += column_name(order[i]);
    }
    return out;
}

std::vector<PacketRecord> parse_capture(std::string_view csv_text, const CsvSchema& schema) {
    std::vector<PacketRecord> packets;
    size_t line_no = 0;
    size_t pos = 0;
    bool saw_header = false;

    while (pos <= csv_text.size()) {
        size_t eol = csv_text.find('\n', pos);
        std::string_view line = csv_text.substr(
            pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = (eol == std::string_view::npos) ? csv_text.size() + 1 : eol + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        if (line.empty()) continue;

        if (!saw_header) {
            if (std::string(line) != schema.header_line())
                throw ParseError(line_no, "header row does not match schema, expected '" +
                                              schema.header_line() + "'");
            saw_header = true;
            continue;
        }

        auto fields = split_fields(line);
        if (fields.size() != schema.order.size())
            throw ParseError(line_no, "expected " + std::to_string(schema.order.size()) +
                                          " fields, got " + std::to_string(fields.size()));

        PacketRecord p;
        try {
            for (size_t i = 0; i < fields.size(); ++i) {
                const std::string& f = fields[i];
                switch (schema.order[i]) {
                    case Column::Timestamp: p.timestamp = parse_timestamp(f, line_no); break;
                    case Column::SrcIp: p.src_ip = parse_ipv4(f); break;
                    case Column::SrcPort:
                        p.src_port = static_cast<uint16_t>(parse_uint(f, line_no, "port", 65535));
                        break;
                    case Column::DstIp: p.dst_ip = parse_ipv4(f); break;
                    case Column::DstPort:
                        p.dst_port = static_cast<uint16_t>(parse_uint(f, line_no, "port", 65535));
                        break;
                    case Column::Protocol:
                        p.protocol = (f == "TCP") ? Protocol::Tcp : Protocol::Other;
                        break;
                    case Column::Size:
                        p.size = static_cast<uint32_t>(parse_uint(f, line_no, "size", UINT32_MAX));
                        break;
                    case Column::Flags: p.flags = parse_flags(f); break;
                    case Column::Seq:
                        p.seq = static_cast<uint32_t>(parse_uint(f, line_no, "seq", UINT32_MAX));
                        break;
                    case Column::PayloadLen:
                        p.payload_len =
                            static_cast<uint32_t>(parse_uint(f, line_no, "payload_len", UINT32_MAX));
                        break;
                }
            }
        } catch (const ParseError& e) {
            if (e.line() != 0) throw;
            throw ParseError(line_no, e.what());
        }
        if (p.payload_len > p.size)
            throw ParseError(line_no, "payload_len " + std::to_string(p.payload_len) +
                                          " exceeds size " + std::to_string(p.size));
        packets.push_back(p);
    }

    if (!saw_header) throw ParseError("no rows");
    if (packets.empty()) throw ParseError("no rows");
    return packets;
}

std::string write_capture(const std::vector<PacketRecord>& packets, const CsvSchema& schema) {
    std::string out = schema.header_line();
    out += '\n';
    char buf[64];
    for (const auto& p : packets) {
        for (size_t i = 0; i < schema.order.size(); ++i) {
            if (i) out += ',';
            switch (schema.order[i]) {
                case CsvSchema::Column::Timestamp:
                    std::snprintf(buf, sizeof(buf), "%.6f", p.timestamp);
                    out += buf;
                    break;
                case CsvSchema::Column::SrcIp: out += format_ipv4(p.src_ip); break;
                case CsvSchema::Column::SrcPort: out += std::to_string(p.src_port); break;
                case CsvSchema::Column::DstIp: out += format_ipv4(p.dst_ip); break;
                case CsvSchema::Column::DstPort: out += std::to_string(p.dst_port); break;
                case CsvSchema::Column::Protocol:
                    out += (p.protocol == Protocol::Tcp) ? "TCP" : "OTHER";
                    break;
                case CsvSchema::Column::Size: out += std::to_string(p.size); break;
                case CsvSchema::Column::Flags: out += format_flags(p.flags); break;
                case CsvSchema::Column::Seq: out += std::to_string(p.seq); break;
                case CsvSchema::Column::PayloadLen: out += std::to_string(p.payload_len); break;
            }
        }
        out += '\n';
    }
    return out;
}

}  // namespace netact
