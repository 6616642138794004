#include "netact/synthgen.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "netact/capture_csv.hpp"
#include "netact/errors.hpp"
#include "netact/features.hpp"
#include "netact/owners.hpp"
#include "netact/packet.hpp"
#include "netact/rng.hpp"

namespace netact {

using nlohmann::json;

namespace {

constexpr double kHeaderBytes = 54.0;   // frame size consumed by Eth+IP+TCP headers
constexpr double kWindowGap = 6.0;      // seconds between windows, > flow timeout
constexpr uint16_t kFirstPort = 40000;  // ephemeral client port range start

struct Endpoint {
    uint32_t ip;
    uint16_t port;
};

class SessionWriter {
public:
    explicit SessionWriter(std::vector<PacketRecord>& packets) : packets_(packets) {}

    /// Emit one full TCP session whose filtered complete series matches
    /// `values` (after jitter). Returns the timestamp of the last packet.
    double emit(double start, Endpoint client, Endpoint server, const ByteSeries& values,
                int jitter, Rng& rng) {
        out_seq_ = 1;
        in_seq_ = 1;
        client_ = client;
        server_ = server;

        double t = start;
        push(t, true, 74, flag::kSyn, 0, 0);
        push(t += 0.002, false, 74, flag::kSyn | flag::kAck, 0, 0);
        push(t += 0.002, true, 66, flag::kAck, out_seq_, 0);

        t += 0.006;
        for (int32_t v : values) {
            bool outgoing = v > 0;
            int64_t size = std::abs(static_cast<int64_t>(v));
            if (jitter > 0) {
                size = std::max<int64_t>(55, size + rng.next_int(-jitter, jitter));
            }
            auto payload = static_cast<uint32_t>(
                std::max<int64_t>(1, size - static_cast<int64_t>(kHeaderBytes)));
            uint32_t& seq = outgoing ? out_seq_ : in_seq_;
            push(t += 0.012, outgoing, static_cast<uint32_t>(size), flag::kAck | flag::kPsh, seq,
                 payload);
            seq += payload;
            // delayed ack from the peer
            push(t + 0.004, !outgoing, 66, flag::kAck, outgoing ? in_seq_ : out_seq_, 0);
        }

        push(t += 0.012, true, 66, flag::kFin | flag::kAck, out_seq_, 0);
        push(t += 0.002, false, 66, flag::kFin | flag::kAck, in_seq_, 0);
        push(t += 0.002, true, 66, flag::kAck, out_seq_, 0);
        return t;
    }

private:
    void push(double t, bool outgoing, uint32_t size, uint8_t flags, uint32_t seq,
              uint32_t payload) {
        PacketRecord p;
        p.timestamp = t;
        p.src_ip = outgoing ? client_.ip : server_.ip;
        p.src_port = outgoing ? client_.port : server_.port;
        p.dst_ip = outgoing ? server_.ip : client_.ip;
        p.dst_port = outgoing ? server_.port : client_.port;
        p.protocol = Protocol::Tcp;
        p.size = size;
        p.flags = flags;
        p.seq = seq;
        p.payload_len = payload;
        packets_.push_back(p);
    }

    std::vector<PacketRecord>& packets_;
    Endpoint client_{};
    Endpoint server_{};
    uint32_t out_seq_ = 1;
    uint32_t in_seq_ = 1;
};

}  // namespace

void ScenarioSpec::validate() const {
    if (templates.size() < 2)
        throw ConfigError("scenario needs at least 2 action templates");
    if (accounts < 3)
        throw ConfigError("scenario needs at least 3 accounts for a train/validation/test split");
    if (sequences_per_account < 1) throw ConfigError("sequences_per_account must be >= 1");
    if (noise_flows_per_window < 0) throw ConfigError("noise_flows_per_window must be >= 0");
    for (const auto& tmpl : templates) {
        if (tmpl.label.empty()) throw ConfigError("action template without a label");
        if (tmpl.flows.empty())
            throw ConfigError("action template '" + tmpl.label + "' has no flows");
        for (const auto& flow : tmpl.flows) {
            if (flow.base_complete.empty())
                throw ConfigError("flow template in '" + tmpl.label + "' has an empty series");
            for (int32_t v : flow.base_complete) {
                if (v == 0)
                    throw ConfigError("flow template in '" + tmpl.label + "' has a zero value");
            }
            if (flow.jitter < 0)
                throw ConfigError("flow template in '" + tmpl.label + "' has negative jitter");
            if (flow.drop_prob < 0.0 || flow.drop_prob >= 1.0)
                throw ConfigError("drop_prob must be in [0,1) in '" + tmpl.label + "'");
        }
    }
}

SynthOutput generate(const ScenarioSpec& spec) {
    if (spec.templates.empty()) throw ConfigError("scenario has no templates");
    if (spec.accounts < 1) throw ConfigError("scenario needs at least one account");

    const uint32_t device_ip = parse_ipv4(spec.device_ip);
    const uint32_t app_block = parse_ipv4("31.13.64.0");
    const uint32_t cdn_block = parse_ipv4("23.50.16.0");
    const uint32_t elsewhere_block = parse_ipv4("198.51.100.0");
    const uint32_t unlisted_block = parse_ipv4("203.0.113.0");

    Rng rng(spec.seed);
    std::vector<PacketRecord> packets;
    std::vector<LabelEntry> labels;
    SessionWriter writer(packets);

    uint16_t next_port = kFirstPort;
    auto take_port = [&]() {
        if (next_port >= 65500) next_port = kFirstPort;
        return next_port++;
    };
    uint32_t server_counter = 0;
    auto pick_server = [&](uint32_t block) {
        return Endpoint{block + 1 + (server_counter++ % 250), 443};
    };

    double t = 1000.0;
    for (int account = 0; account < spec.accounts; ++account) {
        std::string account_id = "acc" + std::to_string(account);
        for (int sequence = 0; sequence < spec.sequences_per_account; ++sequence) {
            for (const auto& tmpl : spec.templates) {
                const double window_start = t;
                double window_end = window_start;
                int slot = 0;

                for (size_t f = 0; f < tmpl.flows.size(); ++f) {
                    const auto& flow = tmpl.flows[f];
                    if (flow.drop_prob > 0.0 && rng.next_bernoulli(flow.drop_prob)) continue;

                    Endpoint client{device_ip, take_port()};
                    Endpoint server = pick_server(f % 2 == 0 ? app_block : cdn_block);
                    double flow_start = window_start + 0.12 * slot++;
                    double last = writer.emit(flow_start, client, server, flow.base_complete,
                                              flow.jitter, rng);
                    window_end = std::max(window_end, last);

                    LabelEntry entry;
                    entry.flow_start = flow_start;
                    entry.key = FlowKey{client.ip, client.port, server.ip, server.port};
                    entry.label = tmpl.label;
                    entry.account = account_id;
                    labels.push_back(std::move(entry));
                }

                int noise_count = static_cast<int>(std::floor(spec.noise_flows_per_window));
                double frac = spec.noise_flows_per_window - noise_count;
                if (frac > 0.0 && rng.next_bernoulli(frac)) ++noise_count;
                for (int noise = 0; noise < noise_count; ++noise) {
                    ByteSeries series;
                    int len = static_cast<int>(rng.next_int(4, 9));
                    for (int i = 0; i < len; ++i) {
                        int32_t magnitude = static_cast<int32_t>(rng.next_int(80, 1400));
                        series.push_back(rng.next_bernoulli(0.5) ? magnitude : -magnitude);
                    }
                    Endpoint client{device_ip, take_port()};
                    Endpoint server =
                        pick_server(noise % 2 == 0 ? elsewhere_block : unlisted_block);
                    double flow_start = window_start + 0.12 * slot++;
                    double last = writer.emit(flow_start, client, server, series, 0, rng);
                    window_end = std::max(window_end, last);
                }

                t = std::max(window_end, window_start + tmpl.window_duration) + kWindowGap;
            }
        }
    }

    std::stable_sort(packets.begin(), packets.end(),
                     [](const PacketRecord& a, const PacketRecord& b) {
                         return a.timestamp < b.timestamp;
                     });

    SynthOutput out;
    out.capture_csv = write_capture(packets, CsvSchema::default_schema());
    out.labels_csv = write_labels(labels);
    OwnerMap owners;
    owners.add("31.13.64.0/24", "appco");
    owners.add("23.50.16.0/24", "cdnco");
    owners.add("198.51.100.0/24", "elsewhere");
    out.owner_map_csv = owners.to_text();
    out.target_owners = {"appco", "cdnco"};
    out.device_ip = spec.device_ip;
    return out;
}

std::vector<ActionTemplate> demo_templates() {
    std::vector<ActionTemplate> templates(3);
    templates[0].label = "action-a";
    templates[0].flows = {{{282, -1514, -1514, -315, 188, -113, 514, 96, 1514, 179, 603, 98, 801,
                            98, -477},
                           0,
                           0.0}};
    templates[1].label = "action-b";
    templates[1].flows = {{{282, -1514, -1514, -1266, -582, 188, -113, 692, 423, -661}, 0, 0.0}};
    templates[2].label = "action-c";
    templates[2].flows = {
        {{926, 655, 136, -1245, 913, 1514, 1514, 863, -1514, -107, -465, -172, -111}, 0, 0.0}};
    return templates;
}

ScenarioSpec demo_scenario() {
    ScenarioSpec spec;
    spec.templates = demo_templates();
    spec.accounts = 3;
    spec.sequences_per_account = 1;
    spec.noise_flows_per_window = 0.0;
    spec.seed = 7;
    return spec;
}

ScenarioSpec benchmark_scenario(uint64_t seed) {
    // Fifteen flow archetypes with pairwise DTW separation far above the
    // jitter level; no archetype is shared between classes, so any class
    // stays identifiable even when one of its flows is dropped.
    const std::vector<ByteSeries> archetypes = {
        {210, -1514, -1514, -440, 180, -260},
        {420, 390, -980, -1020, -310},
        {150, -640, 640, -640, 640, -640, 230, -120},
        {1280, 1280, -340, 1280, -340, -210, 500},
        {-860, -860, -860, 240, -860, 240, -860, 150, -900},
        {330, -155, 990, -155, 990, -700},
        {120, 580, -1430, 120, 580, -1430, 120, 580, -1430, -260},
        {-500, 1100, -500, 1100, -500, 1100, -150},
        {720, -720, 1440, -1440, 360},
        {260, 260, 260, 260, -1180, -1180, -1180, -1180},
        {-950, 410, -950, 410, -950, 410},
        {1500, -130, -130, 1500, -130, -130, 1500, -130, -130},
        {640, 170, -1320, 640, 170, -1320, 890},
        {-280, -760, 1240, -280, -760, 1240, -280, -760},
        {190, -540, 880, -1230, 370, -690, 1020, -160, 450, -810, 1350},
    };
    constexpr int kJitter = 35;
    constexpr double kDrop = 0.1;
    auto flow = [&](size_t archetype) { return FlowTemplate{archetypes[archetype], kJitter, kDrop}; };
    auto action = [&](std::string label, std::vector<size_t> arcs) {
        ActionTemplate tmpl;
        tmpl.label = std::move(label);
        for (size_t a : arcs) tmpl.flows.push_back(flow(a));
        return tmpl;
    };

    ScenarioSpec spec;
    spec.templates = {
        action("compose", {0, 1}),
        action("send-message", {2, 3, 3}),
        action("open-inbox", {4, 5}),
        action("refresh-feed", {6, 7}),
        action("open-profile", {8, 9, 9}),
        action("browse-menu", {10, 11}),
        action("other", {12, 13, 14}),
    };
    spec.accounts = 10;
    spec.sequences_per_account = 21;
    spec.noise_flows_per_window = 2.0;
    spec.seed = seed;
    return spec;
}

std::string ScenarioSpec::to_json() const {
    json templates_json = json::array();
    for (const auto& tmpl : templates) {
        json flows = json::array();
        for (const auto& flow : tmpl.flows) {
            flows.push_back({{"series", flow.base_complete},
                             {"jitter", flow.jitter},
                             {"drop_prob", flow.drop_prob}});
        }
        templates_json.push_back({{"label", tmpl.label},
                                  {"window_duration", tmpl.window_duration},
                                  {"flows", flows}});
    }
    json j{{"templates", templates_json},
           {"accounts", accounts},
           {"sequences_per_account", sequences_per_account},
           {"noise_flows_per_window", noise_flows_per_window},
           {"seed", seed},
           {"device_ip", device_ip}};
    return j.dump(2) + "\n";
}

ScenarioSpec ScenarioSpec::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("scenario file is not valid JSON");

    ScenarioSpec spec;
    spec.accounts = j.value("accounts", 3);
    spec.sequences_per_account = j.value("sequences_per_account", 1);
    spec.noise_flows_per_window = j.value("noise_flows_per_window", 0.0);
    spec.seed = j.value("seed", uint64_t{1});
    spec.device_ip = j.value("device_ip", std::string("10.0.0.2"));
    if (!j.contains("templates")) throw ConfigError("scenario has no 'templates' key");
    for (const auto& tmpl_json : j.at("templates")) {
        ActionTemplate tmpl;
        tmpl.label = tmpl_json.at("label").get<std::string>();
        tmpl.window_duration = tmpl_json.value("window_duration", 2.0);
        for (const auto& flow_json : tmpl_json.at("flows")) {
            FlowTemplate flow;
            flow.base_complete = flow_json.at("series").get<ByteSeries>();
            flow.jitter = flow_json.value("jitter", 0);
            flow.drop_prob = flow_json.value("drop_prob", 0.0);
            tmpl.flows.push_back(std::move(flow));
        }
        spec.templates.push_back(std::move(tmpl));
    }
    spec.validate();
    return spec;
}

}  // namespace netact
