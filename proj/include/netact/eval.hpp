#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "netact/cluster.hpp"
#include "netact/features.hpp"
#include "netact/forest.hpp"
#include "netact/metrics.hpp"
#include "netact/owners.hpp"

namespace netact {

struct Split {
    std::vector<ActionWindow> train;
    std::vector<ActionWindow> validation;
    std::vector<ActionWindow> test;
};

/// Route windows by account. Accounts in neither set default to train; the
/// two sets must be disjoint and the test set non-empty.
Split split_by_account(std::span<const ActionWindow> windows,
                       const std::set<std::string>& test_accounts,
                       const std::set<std::string>& validation_accounts);

struct SweepPoint {
    int k = 0;
    double macro_f1 = 0.0;
};

struct SweepResult {
    int best_k = 0;
    std::vector<SweepPoint> curve;
};

/// For each candidate k: cluster the training flows, featurize, train a
/// forest, and score macro-F on the validation windows. Returns the k
/// maximizing the curve (ties toward the smallest k).
SweepResult sweep_clusters(std::span<const ActionWindow> train_windows,
                           std::span<const ActionWindow> validation_windows,
                           const DistanceConfig& config, std::span<const int> k_range,
                           const ForestParams& params, int jobs);

/// Confusion + metrics of the model's predictions over labeled instances.
EvalReport evaluate(const ForestModel& model, std::span<const ActionInstance> instances);

struct ExperimentConfig {
    std::string name = "experiment";
    std::vector<std::filesystem::path> captures;
    std::vector<std::filesystem::path> labels;
    std::filesystem::path owner_map;
    std::vector<std::string> target_owners;
    std::string device_ip;
    double timeout_seconds = 4.5;
    double window_gap_seconds = 0.0;  // 0 = use timeout_seconds
    std::optional<std::vector<std::string>> csv_columns;
    DistanceConfig distance;
    int clusters = 0;                // fixed cluster count (when no sweep)
    std::vector<int> cluster_range;  // candidate ks; non-empty enables the sweep
    ForestParams forest;
    uint64_t seed = 1;
    std::set<std::string> test_accounts;
    std::set<std::string> validation_accounts;
    std::filesystem::path output_dir;

    /// Load from JSON; relative paths are resolved against the file's directory.
    static ExperimentConfig load(const std::filesystem::path& path);
    static ExperimentConfig from_json(const std::string& text,
                                      const std::filesystem::path& base_dir);

    double window_gap() const {
        return window_gap_seconds > 0.0 ? window_gap_seconds : timeout_seconds;
    }
};

struct PipelineStats {
    size_t packets = 0;
    size_t non_tcp = 0;
    size_t foreign = 0;
    size_t flows = 0;
    size_t unmatched_labels = 0;
    size_t domain_dropped = 0;
    size_t flows_kept = 0;
    size_t windows = 0;
};

/// Labeled, preprocessed action windows from the configured captures.
std::vector<ActionWindow> load_windows(const ExperimentConfig& config, PipelineStats* stats);

struct ExperimentResult {
    EvalReport report;
    int k = 0;
    SweepResult sweep;  // curve empty when k was fixed
    ClusterModel cluster_model;
    ForestModel forest_model;
    PipelineStats stats;
    Split split_sizes;  // windows per partition (flows retained)
};

/// Full pipeline: ingest -> preprocess -> cluster (sweep if configured) ->
/// features -> forest -> test evaluation. Writes report.txt, confusion.csv,
/// curve.csv (sweep only), serialized models and datasets into output_dir.
ExperimentResult run_experiment(const ExperimentConfig& config, int jobs, bool quiet = true);

/// Same pipeline without the test evaluation; test accounts may be empty.
/// Validation/test windows are still held out of training. Writes the models,
/// training dataset and sweep curve so later stages can reuse them.
ExperimentResult run_training(const ExperimentConfig& config, int jobs, bool quiet = true);

struct ClassifiedWindow {
    double start = 0.0;
    double end = 0.0;
    size_t flow_count = 0;
    std::string label;
};

/// Label pre-segmented windows of an unlabeled capture: flows are filtered as
/// in training and grouped into windows wherever consecutive flow starts are
/// more than gap_seconds apart.
std::vector<ClassifiedWindow> classify_capture(const std::string& capture_csv,
                                               const ClusterModel& cluster_model,
                                               const ForestModel& forest_model,
                                               const DeviceConfig& device, const OwnerMap& owners,
                                               double gap_seconds);

}  // namespace netact
