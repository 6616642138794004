#include <doctest.h>

#include <map>

#include "netact/capture_csv.hpp"
#include "netact/errors.hpp"
#include "netact/flows.hpp"
#include "netact/rng.hpp"

using namespace netact;

namespace {

const char* kHeader = "timestamp,src_ip,src_port,dst_ip,dst_port,protocol,size,flags,seq,payload_len";

std::string with_header(const std::string& rows) { return std::string(kHeader) + "\n" + rows; }

PacketRecord tcp_packet(double t, const char* src, uint16_t sport, const char* dst, uint16_t dport,
                        uint32_t size = 100) {
    PacketRecord p;
    p.timestamp = t;
    p.src_ip = parse_ipv4(src);
    p.src_port = sport;
    p.dst_ip = parse_ipv4(dst);
    p.dst_port = dport;
    p.protocol = Protocol::Tcp;
    p.size = size;
    p.payload_len = size > 54 ? size - 54 : 0;
    return p;
}

}  // namespace

TEST_CASE("parse_capture maps fields directly") {
    auto packets = parse_capture(
        with_header("1000.000,10.0.0.2,43210,31.13.64.1,443,TCP,282,ACK|PSH,1,216\n"),
        CsvSchema::default_schema());
    REQUIRE(packets.size() == 1);
    const auto& p = packets[0];
    CHECK(p.timestamp == doctest::Approx(1000.0));
    CHECK(p.src_ip == parse_ipv4("10.0.0.2"));
    CHECK(p.src_port == 43210);
    CHECK(p.dst_ip == parse_ipv4("31.13.64.1"));
    CHECK(p.dst_port == 443);
    CHECK(p.protocol == Protocol::Tcp);
    CHECK(p.size == 282);
    CHECK(p.flags == (flag::kAck | flag::kPsh));
    CHECK(p.seq == 1);
    CHECK(p.payload_len == 216);
}

TEST_CASE("parse_capture rejects empty input") {
    CHECK_THROWS_WITH_AS(parse_capture("", CsvSchema::default_schema()), "no rows", ParseError);
    // A lone header is still an empty capture.
    CHECK_THROWS_AS(parse_capture(std::string(kHeader) + "\n", CsvSchema::default_schema()),
                    ParseError);
}

TEST_CASE("parse_capture names the offending line") {
    auto csv = with_header(
        "1.0,10.0.0.2,1,31.13.64.1,443,TCP,100,ACK,1,46\n"
        "2.0,10.0.0.2,70000,31.13.64.1,443,TCP,100,ACK,1,46\n");
    try {
        parse_capture(csv, CsvSchema::default_schema());
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(std::string(e.what()).find("port") != std::string::npos);
    }
}

TEST_CASE("parse_capture validates rows") {
    auto schema = CsvSchema::default_schema();
    CHECK_THROWS_AS(parse_capture(with_header("1.0,10.0.0.2,1,31.13.64.1,443,TCP,100,ACK,1\n"),
                                  schema),
                    ParseError);  // field count
    CHECK_THROWS_AS(parse_capture(with_header("1.0,10.0.0.299,1,31.13.64.1,443,TCP,100,ACK,1,0\n"),
                                  schema),
                    ParseError);  // bad ip
    CHECK_THROWS_AS(parse_capture(with_header("1.0,10.0.0.2,1,31.13.64.1,443,TCP,100,BOGUS,1,0\n"),
                                  schema),
                    ParseError);  // bad flag
    CHECK_THROWS_AS(parse_capture(with_header("1.0,10.0.0.2,1,31.13.64.1,443,TCP,40,ACK,1,60\n"),
                                  schema),
                    ParseError);  // payload > size
    CHECK_THROWS_AS(parse_capture("bogus,header\n1,2\n", schema), ParseError);
}

TEST_CASE("parse_capture keeps non-TCP rows marked other") {
    auto packets = parse_capture(
        with_header("1.0,10.0.0.2,1,31.13.64.1,443,UDP,90,,0,36\n"
                    "2.0,10.0.0.2,1,31.13.64.1,443,TCP,100,ACK,1,46\n"),
        CsvSchema::default_schema());
    REQUIRE(packets.size() == 2);
    CHECK(packets[0].protocol == Protocol::Other);
    CHECK(packets[1].protocol == Protocol::Tcp);
}

TEST_CASE("parse_capture accepts a custom column order") {
    auto schema = CsvSchema::from_names({"size", "timestamp", "src_ip", "src_port", "dst_ip",
                                         "dst_port", "protocol", "flags", "seq", "payload_len"});
    auto packets = parse_capture(
        "size,timestamp,src_ip,src_port,dst_ip,dst_port,protocol,flags,seq,payload_len\n"
        "282,1.5,10.0.0.2,1,31.13.64.1,443,TCP,ACK,1,216\n",
        schema);
    REQUIRE(packets.size() == 1);
    CHECK(packets[0].size == 282);
    CHECK(packets[0].timestamp == doctest::Approx(1.5));
    CHECK_THROWS_AS(CsvSchema::from_names({"timestamp"}), ConfigError);
    CHECK_THROWS_AS(CsvSchema::from_names({"timestamp", "timestamp", "src_ip", "src_port",
                                           "dst_ip", "dst_port", "protocol", "size", "flags",
                                           "seq"}),
                    ConfigError);
}

TEST_CASE("assemble_flows groups by session and splits on timeout") {
    DeviceConfig cfg{parse_ipv4("10.0.0.2"), 4.5};

    SUBCASE("gap below timeout keeps one flow") {
        auto result = assemble_flows({tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443),
                                      tcp_packet(1.3, "31.13.64.1", 443, "10.0.0.2", 40001)},
                                     cfg);
        REQUIRE(result.flows.size() == 1);
        CHECK(result.flows[0].packets.size() == 2);
        CHECK(result.flows[0].start_time == doctest::Approx(1.0));
        CHECK(result.flows[0].end_time == doctest::Approx(1.3));
    }

    SUBCASE("gap above timeout splits") {
        auto result = assemble_flows({tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443),
                                      tcp_packet(6.0, "10.0.0.2", 40001, "31.13.64.1", 443)},
                                     cfg);
        REQUIRE(result.flows.size() == 2);
        CHECK(result.flows[0].packets.size() == 1);
        CHECK(result.flows[1].packets.size() == 1);
    }

    SUBCASE("gap exactly at the timeout does not split") {
        auto result = assemble_flows({tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443),
                                      tcp_packet(5.5, "10.0.0.2", 40001, "31.13.64.1", 443)},
                                     cfg);
        CHECK(result.flows.size() == 1);
    }

    SUBCASE("distinct server ports are distinct flows") {
        auto result = assemble_flows({tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443),
                                      tcp_packet(1.1, "10.0.0.2", 40001, "31.13.64.1", 8443)},
                                     cfg);
        CHECK(result.flows.size() == 2);
    }

    SUBCASE("direction does not affect the key") {
        auto result = assemble_flows({tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443),
                                      tcp_packet(1.1, "31.13.64.1", 443, "10.0.0.2", 40001)},
                                     cfg);
        REQUIRE(result.flows.size() == 1);
        CHECK(result.flows[0].key.client_ip == parse_ipv4("10.0.0.2"));
        CHECK(result.flows[0].key.server_ip == parse_ipv4("31.13.64.1"));
    }

    SUBCASE("foreign and non-TCP packets are dropped and counted") {
        auto foreign = tcp_packet(1.0, "192.0.2.1", 5, "192.0.2.2", 6);
        auto udp = tcp_packet(1.1, "10.0.0.2", 40001, "31.13.64.1", 443);
        udp.protocol = Protocol::Other;
        auto result =
            assemble_flows({foreign, udp, tcp_packet(1.2, "10.0.0.2", 40001, "31.13.64.1", 443)},
                           cfg);
        CHECK(result.flows.size() == 1);
        CHECK(result.dropped_foreign == 1);
        CHECK(result.dropped_non_tcp == 1);
    }
}

TEST_CASE("assemble_flows properties on random traffic") {
    DeviceConfig cfg{parse_ipv4("10.0.0.2"), 4.5};
    Rng rng(42);

    for (int round = 0; round < 20; ++round) {
        std::vector<PacketRecord> packets;
        int n = 30 + static_cast<int>(rng.next_below(60));
        double t = 0.0;
        for (int i = 0; i < n; ++i) {
            t += rng.next_double() * 7.0;
            uint16_t port = static_cast<uint16_t>(40001 + rng.next_below(3));
            bool outgoing = rng.next_bernoulli(0.5);
            packets.push_back(outgoing
                                  ? tcp_packet(t, "10.0.0.2", port, "31.13.64.1", 443)
                                  : tcp_packet(t, "31.13.64.1", 443, "10.0.0.2", port));
        }
        auto result = assemble_flows(packets, cfg);

        // Partition: every packet lands in exactly one flow.
        size_t total = 0;
        for (const auto& flow : result.flows) total += flow.packets.size();
        CHECK(total == packets.size());

        for (const auto& flow : result.flows) {
            REQUIRE(!flow.packets.empty());
            for (size_t i = 1; i < flow.packets.size(); ++i) {
                double gap = flow.packets[i].timestamp - flow.packets[i - 1].timestamp;
                CHECK(gap >= 0.0);
                CHECK(gap <= cfg.timeout_seconds);
            }
            // Idempotence: re-assembling one flow's packets reproduces it.
            auto again = assemble_flows(flow.packets, cfg);
            REQUIRE(again.flows.size() == 1);
            CHECK(again.flows[0].key == flow.key);
            CHECK(again.flows[0].packets.size() == flow.packets.size());
        }
    }
}

TEST_CASE("assemble_flows keeps file order for equal timestamps") {
    auto a = tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443, 100);
    auto b = tcp_packet(1.0, "10.0.0.2", 40001, "31.13.64.1", 443, 200);
    auto result = assemble_flows({a, b}, DeviceConfig{parse_ipv4("10.0.0.2"), 4.5});
    REQUIRE(result.flows.size() == 1);
    CHECK(result.flows[0].packets[0].size == 100);
    CHECK(result.flows[0].packets[1].size == 200);
}
