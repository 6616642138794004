#include "netact/cluster.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "netact/dtw.hpp"
#include "netact/errors.hpp"
#include "netact/fileio.hpp"
#include "netact/kernels/kernels.hpp"
#include "netact/parallel.hpp"

namespace netact {

using nlohmann::json;

void DistanceConfig::validate() const {
    if (views.empty()) throw ConfigError("distance config '" + name + "' has no views");
    for (const auto& view : views) {
        if (!(view.weight > 0.0) || view.weight > 1.0)
            throw ConfigError("distance config '" + name + "': weight must be in (0,1]");
        if (view.interval.x < 1 || view.interval.y < view.interval.x)
            throw ConfigError("distance config '" + name + "': bad interval [" +
                              std::to_string(view.interval.x) + "," +
                              std::to_string(view.interval.y) + "]");
    }
}

namespace {

DistanceConfig two_row_config(std::string name, double w1, double w2,
                              std::vector<std::pair<SeriesType, Interval>> row1,
                              std::vector<std::pair<SeriesType, Interval>> row2) {
    DistanceConfig config;
    config.name = std::move(name);
    for (auto& [type, interval] : row1) config.views.push_back({w1, type, interval});
    for (auto& [type, interval] : row2) config.views.push_back({w2, type, interval});
    return config;
}

using ST = SeriesType;

}  // namespace

DistanceConfig distance_preset(const std::string& name) {
    if (name == "gmail-conf1" || name == "gmail-conf2" || name == "gmail-conf3") {
        double w1 = name == "gmail-conf1" ? 0.80 : name == "gmail-conf2" ? 0.66 : 0.33;
        double w2 = name == "gmail-conf1" ? 0.20 : name == "gmail-conf2" ? 0.33 : 0.66;
        return two_row_config(
            name, w1, w2,
            {{ST::Incoming, {1, 4}}, {ST::Outgoing, {1, 2}}, {ST::Complete, {1, 6}}},
            {{ST::Incoming, {1, 6}}, {ST::Outgoing, {1, 3}}, {ST::Complete, {1, 9}}});
    }
    if (name == "facebook-conf1" || name == "facebook-conf2" || name == "facebook-conf3") {
        double w1 = name == "facebook-conf1" ? 0.66 : name == "facebook-conf2" ? 0.33 : 0.20;
        double w2 = name == "facebook-conf1" ? 0.33 : name == "facebook-conf2" ? 0.66 : 0.80;
        return two_row_config(
            name, w1, w2,
            {{ST::Incoming, {1, 3}}, {ST::Outgoing, {1, 5}}, {ST::Complete, {1, 7}}},
            {{ST::Incoming, {1, 6}}, {ST::Outgoing, {1, 7}}, {ST::Complete, {1, 12}}});
    }
    if (name == "twitter-conf1")
        return two_row_config(name, 0.95, 0.05, {{ST::Complete, {7, 10}}},
                              {{ST::Complete, {1, 10}}});
    if (name == "twitter-conf2")
        return two_row_config(name, 0.95, 0.05, {{ST::Complete, {8, 11}}},
                              {{ST::Complete, {1, 11}}});
    if (name == "twitter-conf3")
        return two_row_config(name, 0.95, 0.05, {{ST::Complete, {8, 10}}},
                              {{ST::Complete, {1, 10}}});
    throw ConfigError("unknown distance preset '" + name + "'");
}

FlowSeriesBundle make_bundle(const Flow& flow, const DistanceConfig& config) {
    FlowSeriesBundle bundle;
    bundle.views.reserve(config.views.size());
    for (const auto& view : config.views) {
        bundle.views.push_back(slice_interval(to_series(flow, view.type), view.interval));
    }
    return bundle;
}

double flow_distance(const FlowSeriesBundle& a, const FlowSeriesBundle& b,
                     const DistanceConfig& config) {
    double total = 0.0;
    for (size_t k = 0; k < config.views.size(); ++k) {
        total += config.views[k].weight * static_cast<double>(dtw_cost(a.views[k], b.views[k]));
    }
    return total;
}

double flow_distance(const Flow& a, const Flow& b, const DistanceConfig& config) {
    return flow_distance(make_bundle(a, config), make_bundle(b, config), config);
}

DistanceMatrix pairwise_distances(std::span<const FlowSeriesBundle> bundles,
                                  const DistanceConfig& config, int jobs) {
    const size_t n = bundles.size();
    DistanceMatrix d(n);
    parallel_for(n, jobs, [&](size_t i) {
        for (size_t j = i + 1; j < n; ++j) {
            d.set(i, j, flow_distance(bundles[i], bundles[j], config));
        }
    });
    return d;
}

namespace {

struct PairKey {
    int a, b;
    bool operator<(const PairKey& o) const { return a != o.a ? a < o.a : b < o.b; }
};

}  // namespace

Linkage Linkage::build(const DistanceMatrix& d) {
    Linkage out;
    const size_t n = d.size();
    out.n_ = n;
    if (n < 2) return out;

    // Working copy, mutated in place by Lance-Williams row merges.
    std::vector<double> work(n * n);
    for (size_t i = 0; i < n; ++i)
        std::copy(d.row(i), d.row(i) + n, work.begin() + static_cast<ptrdiff_t>(i * n));

    std::vector<char> active(n, 1);
    std::vector<double> csize(n, 1.0);
    std::vector<int> rep(n);
    std::iota(rep.begin(), rep.end(), 0);

    auto pair_key = [&](size_t i, size_t j) {
        return PairKey{std::min(rep[i], rep[j]), std::max(rep[i], rep[j])};
    };
    auto better = [](double d1, PairKey k1, double d2, PairKey k2) {
        return d1 != d2 ? d1 < d2 : k1 < k2;
    };

    std::vector<size_t> nn_idx(n, 0);
    std::vector<double> nn_dist(n, 0.0);
    auto recompute_nn = [&](size_t i) {
        double best = std::numeric_limits<double>::infinity();
        PairKey best_key{INT32_MAX, INT32_MAX};
        size_t best_j = n;
        const double* row = work.data() + i * n;
        for (size_t j = 0; j < n; ++j) {
            if (j == i || !active[j]) continue;
            PairKey key = pair_key(i, j);
            if (best_j == n || better(row[j], key, best, best_key)) {
                best = row[j];
                best_key = key;
                best_j = j;
            }
        }
        nn_idx[i] = best_j;
        nn_dist[i] = best;
    };
    for (size_t i = 0; i < n; ++i) recompute_nn(i);

    out.steps_.reserve(n - 1);
    for (size_t merge = 0; merge + 1 < n; ++merge) {
        // Globally best pair under (distance, representative pair) order.
        size_t u = n;
        double best = std::numeric_limits<double>::infinity();
        PairKey best_key{INT32_MAX, INT32_MAX};
        for (size_t i = 0; i < n; ++i) {
            if (!active[i]) continue;
            PairKey key = pair_key(i, nn_idx[i]);
            if (u == n || better(nn_dist[i], key, best, best_key)) {
                best = nn_dist[i];
                best_key = key;
                u = i;
            }
        }
        size_t v = nn_idx[u];
        if (rep[v] < rep[u]) std::swap(u, v);  // merged cluster keeps the smaller rep's slot
        out.steps_.push_back(MergeStep{rep[u], rep[v], best});

        double* row_u = work.data() + u * n;
        double* row_v = work.data() + v * n;
        kernels::merge_linkage_rows(std::span<double>(row_u, n),
                                    std::span<const double>(row_u, n),
                                    std::span<const double>(row_v, n), csize[u], csize[v]);
        row_u[u] = 0.0;
        active[v] = 0;
        csize[u] += csize[v];
        for (size_t w = 0; w < n; ++w) {
            if (active[w] && w != u) work[w * n + u] = row_u[w];
        }

        recompute_nn(u);
        for (size_t w = 0; w < n; ++w) {
            if (!active[w] || w == u) continue;
            if (nn_idx[w] == u || nn_idx[w] == v) recompute_nn(w);
        }
    }
    return out;
}

std::vector<int> Linkage::cut(int k) const {
    if (k < 1 || static_cast<size_t>(k) > n_)
        throw EvalError("cluster count " + std::to_string(k) + " out of range for " +
                        std::to_string(n_) + " observations");

    std::vector<int> parent(n_);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    const size_t merges = n_ - static_cast<size_t>(k);
    for (size_t s = 0; s < merges; ++s) {
        int a = find(steps_[s].left_rep);
        int b = find(steps_[s].right_rep);
        // left_rep < right_rep, so attaching b under a keeps roots minimal
        parent[b] = a;
    }

    std::vector<int> root_to_id(n_, -1);
    int next_id = 0;
    std::vector<int> membership(n_);
    for (size_t i = 0; i < n_; ++i) {
        int root = find(static_cast<int>(i));
        if (root_to_id[root] < 0) root_to_id[root] = next_id++;
        membership[i] = root_to_id[root];
    }
    return membership;
}

std::vector<int> agglomerate(const DistanceMatrix& d, int k) {
    return Linkage::build(d).cut(k);
}

double linkage_distance(std::span<const int> u, std::span<const int> v, const DistanceMatrix& d) {
    if (u.empty() || v.empty()) throw EvalError("linkage distance of an empty cluster");
    double sum = 0.0;
    for (int i : u) {
        for (int j : v) sum += d(static_cast<size_t>(i), static_cast<size_t>(j));
    }
    return sum / (static_cast<double>(u.size()) * static_cast<double>(v.size()));
}

int elect_leader(std::span<const int> members, const DistanceMatrix& d) {
    if (members.empty()) throw EvalError("cannot elect a leader of an empty cluster");
    int best = -1;
    double best_sum = 0.0;
    for (int i : members) {
        double sum = 0.0;
        for (int j : members) sum += d(static_cast<size_t>(i), static_cast<size_t>(j));
        if (best < 0 || sum < best_sum || (sum == best_sum && i < best)) {
            best = i;
            best_sum = sum;
        }
    }
    return best;
}

int ClusterModel::assign(const FlowSeriesBundle& bundle) const {
    if (leaders.empty()) throw ModelError("cluster model has no leaders");
    int best = 0;
    double best_dist = flow_distance(bundle, leaders[0], config);
    for (size_t c = 1; c < leaders.size(); ++c) {
        double dist = flow_distance(bundle, leaders[c], config);
        if (dist < best_dist) {
            best_dist = dist;
            best = static_cast<int>(c);
        }
    }
    return best;
}

int ClusterModel::assign(const Flow& flow) const { return assign(make_bundle(flow, config)); }

ClusterModel make_cluster_model(const DistanceConfig& config, int k, const Linkage& linkage,
                                const DistanceMatrix& d,
                                std::span<const FlowSeriesBundle> bundles) {
    ClusterModel model;
    model.config = config;
    model.k = k;
    model.membership = linkage.cut(k);

    std::vector<std::vector<int>> clusters(static_cast<size_t>(k));
    for (size_t i = 0; i < model.membership.size(); ++i)
        clusters[static_cast<size_t>(model.membership[i])].push_back(static_cast<int>(i));

    model.leaders.reserve(static_cast<size_t>(k));
    model.leader_indices.reserve(static_cast<size_t>(k));
    for (const auto& members : clusters) {
        int leader = elect_leader(members, d);
        model.leader_indices.push_back(leader);
        model.leaders.push_back(bundles[static_cast<size_t>(leader)]);
    }
    return model;
}

namespace {

json config_to_json(const DistanceConfig& config) {
    json views = json::array();
    for (const auto& view : config.views) {
        views.push_back({{"weight", view.weight},
                         {"series", series_type_name(view.type)},
                         {"interval", {view.interval.x, view.interval.y}}});
    }
    return json{{"name", config.name}, {"views", views}};
}

DistanceConfig config_from_json(const json& j) {
    DistanceConfig config;
    config.name = j.at("name").get<std::string>();
    for (const auto& view : j.at("views")) {
        SeriesView sv;
        sv.weight = view.at("weight").get<double>();
        sv.type = parse_series_type(view.at("series").get<std::string>());
        sv.interval.x = view.at("interval").at(0).get<int>();
        sv.interval.y = view.at("interval").at(1).get<int>();
        config.views.push_back(sv);
    }
    config.validate();
    return config;
}

}  // namespace

std::string ClusterModel::to_json() const {
    json leaders_json = json::array();
    for (const auto& leader : leaders) {
        json views = json::array();
        for (const auto& series : leader.views) views.push_back(series);
        leaders_json.push_back(std::move(views));
    }
    json j{{"format", "netact-cluster-model"},
           {"version", 1},
           {"config", config_to_json(config)},
           {"k", k},
           {"leaders", leaders_json},
           {"leader_indices", leader_indices},
           {"membership", membership}};
    return j.dump(2) + "\n";
}

ClusterModel ClusterModel::from_json(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ModelError("cluster model file is not valid JSON");
    if (j.value("format", "") != "netact-cluster-model")
        throw ModelError("not a cluster model file");
    if (j.value("version", 0) != 1) throw ModelError("unsupported cluster model version");

    ClusterModel model;
    model.config = config_from_json(j.at("config"));
    model.k = j.at("k").get<int>();
    for (const auto& leader : j.at("leaders")) {
        FlowSeriesBundle bundle;
        for (const auto& series : leader) bundle.views.push_back(series.get<ByteSeries>());
        if (bundle.views.size() != model.config.views.size())
            throw ModelError("leader view count does not match distance config");
        model.leaders.push_back(std::move(bundle));
    }
    model.leader_indices = j.at("leader_indices").get<std::vector<int>>();
    model.membership = j.at("membership").get<std::vector<int>>();
    if (model.leaders.size() != static_cast<size_t>(model.k))
        throw ModelError("leader count does not match k");
    return model;
}

void ClusterModel::save(const std::filesystem::path& path) const { write_file(path, to_json()); }

ClusterModel ClusterModel::load(const std::filesystem::path& path) {
    return from_json(read_file(path));
}

}  // namespace netact
