#include "netact/forest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include <json.hpp>

#include "netact/errors.hpp"
#include "netact/fileio.hpp"
#include "netact/parallel.hpp"
#include "netact/rng.hpp"

namespace netact {

using nlohmann::json;

namespace {

double gini(const std::vector<int>& counts, int total) {
    if (total == 0) return 0.0;
    double sum_sq = 0.0;
    for (int c : counts) {
        double p = static_cast<double>(c) / total;
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

struct TrainingView {
    std::span<const ActionInstance> data;
    std::vector<int> class_of;  // instance -> label index
    int n_classes = 0;
    int n_features = 0;
};

struct SplitChoice {
    bool found = false;
    int feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;

    bool beats(const SplitChoice& o) const {
        if (!o.found) return found;
        if (decrease != o.decrease) return decrease > o.decrease;
        if (feature != o.feature) return feature < o.feature;
        return threshold < o.threshold;
    }
};

class TreeBuilder {
public:
    TreeBuilder(const TrainingView& view, int max_features, Rng rng)
        : view_(view), max_features_(max_features), rng_(rng) {}

    Tree build(std::vector<int> sample_indices) {
        tree_.nodes.clear();
        grow(std::move(sample_indices));
        return std::move(tree_);
    }

private:
    // Returns the node index. Depth-first, left before right, so node layout
    // is deterministic.
    int grow(std::vector<int> samples) {
        std::vector<int> counts(static_cast<size_t>(view_.n_classes), 0);
        for (int s : samples) ++counts[static_cast<size_t>(view_.class_of[static_cast<size_t>(s)])];
        const int total = static_cast<int>(samples.size());
        const double node_gini = gini(counts, total);

        int node_index = static_cast<int>(tree_.nodes.size());
        tree_.nodes.emplace_back();

        SplitChoice split;
        if (node_gini > 0.0) split = choose_split(samples, counts, node_gini);
        if (!split.found) {
            tree_.nodes[static_cast<size_t>(node_index)].counts = std::move(counts);
            return node_index;
        }

        std::vector<int> left_samples, right_samples;
        for (int s : samples) {
            const auto& f = view_.data[static_cast<size_t>(s)].features;
            if (f[static_cast<size_t>(split.feature)] <= split.threshold)
                left_samples.push_back(s);
            else
                right_samples.push_back(s);
        }
        samples.clear();
        samples.shrink_to_fit();

        int left = grow(std::move(left_samples));
        int right = grow(std::move(right_samples));
        TreeNode& node = tree_.nodes[static_cast<size_t>(node_index)];
        node.feature = split.feature;
        node.threshold = split.threshold;
        node.left = left;
        node.right = right;
        return node_index;
    }

    // Evaluate a random feature subset; keep drawing past constant features
    // until max_features informative ones were scored (or none remain).
    SplitChoice choose_split(const std::vector<int>& samples, const std::vector<int>& counts,
                             double node_gini) {
        std::vector<int> order(static_cast<size_t>(view_.n_features));
        std::iota(order.begin(), order.end(), 0);
        rng_.shuffle(order);

        SplitChoice best;
        int scored = 0;
        for (int feature : order) {
            if (scored >= max_features_) break;
            SplitChoice candidate = best_split_on(feature, samples, counts, node_gini);
            if (!candidate.found) continue;  // constant within this node
            ++scored;
            if (candidate.beats(best)) best = candidate;
        }
        return best;
    }

    SplitChoice best_split_on(int feature, const std::vector<int>& samples,
                              const std::vector<int>& counts, double node_gini) {
        sorted_.assign(samples.begin(), samples.end());
        std::sort(sorted_.begin(), sorted_.end(), [&](int a, int b) {
            return view_.data[static_cast<size_t>(a)].features[static_cast<size_t>(feature)] <
                   view_.data[static_cast<size_t>(b)].features[static_cast<size_t>(feature)];
        });

        const int total = static_cast<int>(sorted_.size());
        std::vector<int> left_counts(static_cast<size_t>(view_.n_classes), 0);
        SplitChoice best;

        for (int i = 0; i + 1 < total; ++i) {
            int s = sorted_[static_cast<size_t>(i)];
            ++left_counts[static_cast<size_t>(view_.class_of[static_cast<size_t>(s)])];
            int value = view_.data[static_cast<size_t>(s)].features[static_cast<size_t>(feature)];
            int next = view_.data[static_cast<size_t>(sorted_[static_cast<size_t>(i + 1)])]
                           .features[static_cast<size_t>(feature)];
            if (value == next) continue;

            const int nl = i + 1;
            const int nr = total - nl;
            double gini_left = gini(left_counts, nl);
            double gini_right = 0.0;
            {
                double sum_sq = 0.0;
                for (size_t c = 0; c < left_counts.size(); ++c) {
                    double p = static_cast<double>(counts[c] - left_counts[c]) / nr;
                    sum_sq += p * p;
                }
                gini_right = 1.0 - sum_sq;
            }
            SplitChoice candidate;
            candidate.found = true;
            candidate.feature = feature;
            candidate.threshold = (static_cast<double>(value) + next) / 2.0;
            candidate.decrease =
                node_gini - (nl * gini_left + nr * gini_right) / static_cast<double>(total);
            if (candidate.beats(best)) best = candidate;
        }
        return best;
    }

    const TrainingView& view_;
    int max_features_;
    Rng rng_;
    Tree tree_;
    std::vector<int> sorted_;
};

const TreeNode& descend(const Tree& tree, std::span<const int> features) {
    const TreeNode* node = &tree.nodes[0];
    while (node->feature >= 0) {
        int next = features[static_cast<size_t>(node->feature)] <= node->threshold ? node->left
                                                                                   : node->right;
        node = &tree.nodes[static_cast<size_t>(next)];
    }
    return *node;
}

}  // namespace

ForestModel train_forest(std::span<const ActionInstance> data, const ForestParams& params,
                         int jobs) {
    if (data.empty()) throw ModelError("cannot train a forest on empty data");
    if (params.n_estimators < 1) throw ModelError("n_estimators must be >= 1");

    TrainingView view;
    view.data = data;
    view.n_features = static_cast<int>(data[0].features.size());
    if (view.n_features < 1) throw ModelError("instances have no features");
    for (const auto& instance : data) {
        if (static_cast<int>(instance.features.size()) != view.n_features)
            throw ModelError("inconsistent feature dimensions in training data");
    }

    std::set<std::string> label_set;
    for (const auto& instance : data) label_set.insert(instance.label);
    ForestModel model;
    model.labels.assign(label_set.begin(), label_set.end());
    std::map<std::string, int> label_index;
    for (size_t i = 0; i < model.labels.size(); ++i)
        label_index[model.labels[i]] = static_cast<int>(i);
    view.n_classes = static_cast<int>(model.labels.size());
    view.class_of.reserve(data.size());
    for (const auto& instance : data) view.class_of.push_back(label_index[instance.label]);

    model.params = params;
    model.n_features = view.n_features;
    if (model.params.max_features == 0)
        model.params.max_features =
            std::max(1, static_cast<int>(std::floor(std::sqrt(view.n_features))));
    if (model.params.max_features > view.n_features)
        throw ModelError("max_features exceeds the feature count");

    const int n_trees = params.n_estimators;
    model.trees.resize(static_cast<size_t>(n_trees));
    parallel_for(static_cast<size_t>(n_trees), jobs, [&](size_t t) {
        Rng tree_rng = Rng(params.seed).fork(t);
        std::vector<int> samples;
        samples.reserve(data.size());
        if (params.bootstrap) {
            for (size_t i = 0; i < data.size(); ++i)
                samples.push_back(static_cast<int>(tree_rng.next_below(data.size())));
        } else {
            samples.resize(data.size());
            std::iota(samples.begin(), samples.end(), 0);
        }
        TreeBuilder builder(view, model.params.max_features, tree_rng.fork(1));
        model.trees[t] = builder.build(std::move(samples));
    });
    return model;
}

std::string ForestModel::predict(std::span<const int> features) const {
    if (static_cast<int>(features.size()) != n_features)
        throw ModelError("feature vector has dimension " + std::to_string(features.size()) +
                         ", model expects " + std::to_string(n_features));
    std::vector<int> votes(labels.size(), 0);
    for (const auto& tree : trees) {
        const TreeNode& leaf = descend(tree, features);
        int best_class = 0;
        for (size_t c = 1; c < leaf.counts.size(); ++c) {
            if (leaf.counts[c] > leaf.counts[static_cast<size_t>(best_class)])
                best_class = static_cast<int>(c);
        }
        ++votes[static_cast<size_t>(best_class)];
    }
    int winner = 0;
    for (size_t c = 1; c < votes.size(); ++c) {
        if (votes[c] > votes[static_cast<size_t>(winner)]) winner = static_cast<int>(c);
    }
    return labels[static_cast<size_t>(winner)];
}

std::vector<double> ForestModel::predict_proba(std::span<const int> features) const {
    if (static_cast<int>(features.size()) != n_features)
        throw ModelError("feature vector has dimension " + std::to_string(features.size()) +
                         ", model expects " + std::to_string(n_features));
    std::vector<double> proba(labels.size(), 0.0);
    for (const auto& tree : trees) {
        const TreeNode& leaf = descend(tree, features);
        int total = 0;
        for (int c : leaf.counts) total += c;
        for (size_t c = 0; c < leaf.counts.size(); ++c) {
            proba[c] += static_cast<double>(leaf.counts[c]) / total;
        }
    }
    for (double& p : proba) p /= static_cast<double>(trees.size());
    return proba;
}

std::string ForestModel::to_json() const {
    json trees_json = json::array();
    for (const auto& tree : trees) {
        json nodes = json::array();
        for (const auto& node : tree.nodes) {
            if (node.feature < 0) {
                nodes.push_back(json{{"counts", node.counts}});
            } else {
                nodes.push_back(json{{"feature", node.feature},
                                     {"threshold", node.threshold},
                                     {"left", node.left},
                                     {"right", node.right}});
            }
        }
        trees_json.push_back(std::move(nodes));
    }
    json j{{"format", "netact-forest-model"},
           {"version", 1},
           {"params",
            {{"n_estimators", params.n_estimators},
             {"max_features", params.max_features},
             {"bootstrap", params.bootstrap},
             {"seed", params.seed}}},
           {"labels", labels},
           {"n_features", n_features},
           {"trees", trees_json}};
    return j.dump() + "\n";
}

ForestModel ForestModel::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ModelError("forest model file is not valid JSON");
    if (j.value("format", "") != "netact-forest-model") throw ModelError("not a forest model file");
    if (j.value("version", 0) != 1) throw ModelError("unsupported forest model version");

    ForestModel model;
    const auto& p = j.at("params");
    model.params.n_estimators = p.at("n_estimators").get<int>();
    model.params.max_features = p.at("max_features").get<int>();
    model.params.bootstrap = p.at("bootstrap").get<bool>();
    model.params.seed = p.at("seed").get<uint64_t>();
    model.labels = j.at("labels").get<std::vector<std::string>>();
    model.n_features = j.at("n_features").get<int>();
    for (const auto& tree_json : j.at("trees")) {
        Tree tree;
        for (const auto& node_json : tree_json) {
            TreeNode node;
            if (node_json.contains("feature")) {
                node.feature = node_json.at("feature").get<int>();
                node.threshold = node_json.at("threshold").get<double>();
                node.left = node_json.at("left").get<int>();
                node.right = node_json.at("right").get<int>();
            } else {
                node.counts = node_json.at("counts").get<std::vector<int>>();
            }
            tree.nodes.push_back(std::move(node));
        }
        if (tree.nodes.empty()) throw ModelError("forest model contains an empty tree");
        model.trees.push_back(std::move(tree));
    }
    if (model.trees.size() != static_cast<size_t>(model.params.n_estimators))
        throw ModelError("tree count does not match n_estimators");
    return model;
}

void ForestModel::save(const std::filesystem::path& path) const { write_file(path, to_json()); }

ForestModel ForestModel::load(const std::filesystem::path& path) {
    return from_json(read_file(path));
}

}  // namespace netact
