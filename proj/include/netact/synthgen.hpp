#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netact/series.hpp"

namespace netact {

/// One recurring flow shape: the signed complete series it should produce
/// after filtering (positive = outgoing), plus per-packet byte jitter and the
/// probability that an execution omits the flow entirely.
struct FlowTemplate {
    ByteSeries base_complete;
    int jitter = 0;          // max absolute per-packet size noise, bytes
    double drop_prob = 0.0;  // in [0, 1)
};

/// The multiset of flows one user action triggers.
struct ActionTemplate {
    std::string label;
    std::vector<FlowTemplate> flows;
    double window_duration = 2.0;  // seconds
};

struct ScenarioSpec {
    std::vector<ActionTemplate> templates;
    int accounts = 3;
    int sequences_per_account = 1;  // each sequence executes every template once
    double noise_flows_per_window = 0.0;
    uint64_t seed = 1;
    std::string device_ip = "10.0.0.2";

    void validate() const;  // throws ConfigError

    static ScenarioSpec from_json(const std::string& text);
    std::string to_json() const;
};

/// Everything a downstream experiment needs, in the ingest module's formats.
struct SynthOutput {
    std::string capture_csv;
    std::string labels_csv;
    std::string owner_map_csv;
    std::vector<std::string> target_owners;
    std::string device_ip;
};

/// Render a scenario as synthetic traffic: per window, each surviving flow
/// template becomes a full TCP session (handshake, jittered data packets with
/// interleaved pure ACKs, teardown) from a fresh client port; noise flows
/// target servers outside the emitted owner allowlist; windows are separated
/// by more than the flow timeout. Deterministic under the spec seed.
SynthOutput generate(const ScenarioSpec& spec);

/// Built-in demo templates: three flows whose filtered complete series are
/// fixed reference shapes (no jitter, no drops).
std::vector<ActionTemplate> demo_templates();

/// Demo scenario wrapping demo_templates(): 3 accounts, 1 sequence, no noise.
ScenarioSpec demo_scenario();

/// Desk-scale benchmark: six action classes plus "other", each a distinct
/// multiset of well-separated flow archetypes, 10 accounts x 21 sequences,
/// per-packet jitter up to 35 bytes, 10% flow drops, 2 noise flows per window.
ScenarioSpec benchmark_scenario(uint64_t seed);

}  // namespace netact
