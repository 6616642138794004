#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "netact/features.hpp"

namespace netact {

struct ForestParams {
    int n_estimators = 40;
    int max_features = 0;  // 0 = floor(sqrt(feature count))
    bool bootstrap = true;
    uint64_t seed = 0;
};

/// Binary decision tree node. Internal nodes route value(feature) <= threshold
/// to `left`, else `right`; leaves carry the class-count histogram.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<int> counts;
};

struct Tree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestModel {
    ForestParams params;
    std::vector<std::string> labels;  // vote ties break toward earlier entries
    int n_features = 0;
    std::vector<Tree> trees;

    /// Majority vote over per-tree leaf majorities.
    std::string predict(std::span<const int> features) const;

    /// Mean of per-tree leaf class frequencies; sums to 1.
    std::vector<double> predict_proba(std::span<const int> features) const;

    std::string to_json() const;
    static ForestModel from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static ForestModel load(const std::filesystem::path& path);
};

/// Train a Random Forest on cluster-count instances. Each tree sees a
/// bootstrap resample and considers a random feature subset at every node;
/// splits maximize Gini impurity decrease with thresholds at midpoints
/// between adjacent observed values. Deterministic for a given (data, seed).
ForestModel train_forest(std::span<const ActionInstance> data, const ForestParams& params,
                         int jobs = 1);

}  // namespace netact
