#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "netact/packet.hpp"
#include "netact/series.hpp"

namespace netact {

/// One weighted view of a flow: a series type restricted to a packet interval.
struct SeriesView {
    double weight = 1.0;
    SeriesType type = SeriesType::Complete;
    Interval interval;
};

/// The flow-to-flow distance definition: a weighted sum of per-view DTW costs.
struct DistanceConfig {
    std::string name;
    std::vector<SeriesView> views;

    void validate() const;  // throws ConfigError
};

/// Named example configurations (per-app weight/interval sets):
/// gmail-conf1..3, facebook-conf1..3, twitter-conf1..3.
DistanceConfig distance_preset(const std::string& name);

/// A flow pre-sliced into the series views of one DistanceConfig.
struct FlowSeriesBundle {
    std::vector<ByteSeries> views;
};

FlowSeriesBundle make_bundle(const Flow& flow, const DistanceConfig& config);

double flow_distance(const FlowSeriesBundle& a, const FlowSeriesBundle& b,
                     const DistanceConfig& config);
double flow_distance(const Flow& a, const Flow& b, const DistanceConfig& config);

/// Symmetric pairwise distance matrix with zero diagonal, stored dense.
class DistanceMatrix {
public:
    DistanceMatrix() = default;
    explicit DistanceMatrix(size_t n) : n_(n), cells_(n * n, 0.0) {}

    size_t size() const { return n_; }
    double operator()(size_t i, size_t j) const { return cells_[i * n_ + j]; }
    void set(size_t i, size_t j, double value) {
        cells_[i * n_ + j] = value;
        cells_[j * n_ + i] = value;
    }
    const double* row(size_t i) const { return cells_.data() + i * n_; }

private:
    size_t n_ = 0;
    std::vector<double> cells_;
};

/// All pairwise flow distances under one config; rows computed in parallel.
DistanceMatrix pairwise_distances(std::span<const FlowSeriesBundle> bundles,
                                  const DistanceConfig& config, int jobs);

/// One agglomeration event. Clusters are identified by their representative:
/// the smallest original observation index among their members.
struct MergeStep {
    int left_rep = 0;   // smaller representative
    int right_rep = 0;  // larger representative
    double distance = 0.0;
};

/// Full average-linkage merge hierarchy over a distance matrix. Pairs with
/// minimal average linkage merge first; exact ties break toward the
/// lexicographically smallest (left_rep, right_rep) pair.
class Linkage {
public:
    static Linkage build(const DistanceMatrix& d);

    size_t observations() const { return n_; }
    const std::vector<MergeStep>& steps() const { return steps_; }

    /// Partition into k clusters. Cluster ids 0..k-1 are ordered by each
    /// cluster's smallest original member index.
    std::vector<int> cut(int k) const;  // throws EvalError if k out of range

private:
    size_t n_ = 0;
    std::vector<MergeStep> steps_;
};

/// Convenience: build the hierarchy and cut it at k clusters.
std::vector<int> agglomerate(const DistanceMatrix& d, int k);

/// Average linkage between two disjoint clusters, by the definitional double
/// sum: mean of all pairwise member distances. Linkage::build computes the
/// same quantity incrementally; both routes must agree within 1e-9.
double linkage_distance(std::span<const int> u, std::span<const int> v, const DistanceMatrix& d);

/// Member with the minimal sum of distances to all members; ties break toward
/// the smallest index.
int elect_leader(std::span<const int> members, const DistanceMatrix& d);

/// Elected leader flows plus the distance configuration. Maps any flow to its
/// nearest cluster by leader distance.
struct ClusterModel {
    DistanceConfig config;
    int k = 0;
    std::vector<FlowSeriesBundle> leaders;  // index = cluster id
    std::vector<int> leader_indices;        // training-flow index of each leader
    std::vector<int> membership;            // training-flow index -> cluster id

    /// Cluster whose leader is nearest to the flow; ties -> lowest cluster id.
    int assign(const FlowSeriesBundle& bundle) const;
    int assign(const Flow& flow) const;

    std::string to_json() const;
    static ClusterModel from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static ClusterModel load(const std::filesystem::path& path);
};

/// Cluster training bundles: cut the hierarchy at k, elect per-cluster leaders.
ClusterModel make_cluster_model(const DistanceConfig& config, int k, const Linkage& linkage,
                                const DistanceMatrix& d,
                                std::span<const FlowSeriesBundle> bundles);

}  // namespace netact
