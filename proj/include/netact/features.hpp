#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "netact/cluster.hpp"
#include "netact/packet.hpp"

namespace netact {

/// One executed user action: its ground-truth label, the account that ran it,
/// its time span, and the flows captured while it ran.
struct ActionWindow {
    std::string label;
    std::string account;
    double start = 0.0;
    double end = 0.0;
    std::vector<Flow> flows;
};

/// A classifier instance: per-cluster flow counts for one action window.
struct ActionInstance {
    std::string label;
    std::string account;
    std::vector<int> features;
};

/// One line of the label sidecar: ties the flow starting at `flow_start` on
/// `key` to the action and account that produced it.
struct LabelEntry {
    double flow_start = 0.0;
    FlowKey key;
    std::string label;
    std::string account;
};

/// Parse sidecar lines `flow_start,flow_key,action_label,account_id`.
std::vector<LabelEntry> parse_labels(std::string_view text);
std::string write_labels(std::span<const LabelEntry> entries);

/// Attach labels to flows: an entry matches the flow with the same key whose
/// [start_time, end_time] span contains the entry's flow_start. Returns the
/// number of entries that matched nothing.
size_t apply_labels(std::vector<Flow>& flows, std::span<const LabelEntry> entries);

/// Group labeled flows into action windows: flows sorted by start time belong
/// to the same window while the label and account stay the same and
/// consecutive start times are at most `gap_seconds` apart. Unlabeled flows
/// are skipped. Window spans cover their member flows.
std::vector<ActionWindow> group_windows(std::span<const Flow> flows, double gap_seconds);

/// feature[c] = number of window flows assigned to cluster c. A window with
/// no flows yields the all-zero vector.
ActionInstance build_instance(const ActionWindow& window, const ClusterModel& model);

/// One instance per window, order preserved.
std::vector<ActionInstance> build_dataset(std::span<const ActionWindow> windows,
                                          const ClusterModel& model);

/// Dataset interchange CSV: header `label,account,f0,...,f{k-1}`.
std::string write_dataset(std::span<const ActionInstance> instances, int k);
std::vector<ActionInstance> parse_dataset(std::string_view text);

}  // namespace netact
