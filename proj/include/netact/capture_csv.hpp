#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netact/packet.hpp"

namespace netact {

/// Column-order descriptor for capture CSV files. The default order is
/// timestamp,src_ip,src_port,dst_ip,dst_port,protocol,size,flags,seq,payload_len
/// and a header row naming the columns is required.
struct CsvSchema {
    enum class Column {
        Timestamp,
        SrcIp,
        SrcPort,
        DstIp,
        DstPort,
        Protocol,
        Size,
        Flags,
        Seq,
        PayloadLen,
    };

    std::vector<Column> order;

    static CsvSchema default_schema();

    /// Build a schema from column names, e.g. {"timestamp","src_ip",...}.
    /// All ten columns must appear exactly once.
    static CsvSchema from_names(const std::vector<std::string>& names);

    std::string header_line() const;
};

/// Parse a capture CSV into packet records, one per data row, in file order.
/// Non-TCP rows are retained with protocol `Other`. Malformed rows raise
/// ParseError naming the offending line; an input without data rows is an error.
std::vector<PacketRecord> parse_capture(std::string_view csv_text, const CsvSchema& schema);

/// Serialize packets back to the CSV wire format (header + one row per packet).
std::string write_capture(const std::vector<PacketRecord>& packets, const CsvSchema& schema);

}  // namespace netact
