#include "netact/eval.hpp"

#include <algorithm>
#include <cstdio>

#include <json.hpp>

#include "netact/capture_csv.hpp"
#include "netact/errors.hpp"
#include "netact/fileio.hpp"
#include "netact/filter.hpp"
#include "netact/flows.hpp"
#include "netact/parallel.hpp"

namespace netact {

using nlohmann::json;

Split split_by_account(std::span<const ActionWindow> windows,
                       const std::set<std::string>& test_accounts,
                       const std::set<std::string>& validation_accounts) {
    if (test_accounts.empty()) throw EvalError("test account set is empty, evaluation impossible");
    for (const auto& account : test_accounts) {
        if (validation_accounts.count(account))
            throw EvalError("account '" + account + "' appears in both test and validation sets");
    }
    Split split;
    for (const auto& window : windows) {
        if (window.account.empty()) throw EvalError("window without an account id");
        if (test_accounts.count(window.account)) {
            split.test.push_back(window);
        } else if (validation_accounts.count(window.account)) {
            split.validation.push_back(window);
        } else {
            split.train.push_back(window);
        }
    }
    return split;
}

namespace {

/// Training flows flattened in window order, with everything the sweep reuses
/// across cluster counts.
struct ClusteredTraining {
    std::vector<FlowSeriesBundle> bundles;
    std::vector<std::pair<size_t, size_t>> window_ranges;  // per window [begin, end)
    DistanceMatrix matrix;
    Linkage linkage;
};

ClusteredTraining prepare_training(std::span<const ActionWindow> train_windows,
                                   const DistanceConfig& config, int jobs) {
    ClusteredTraining prep;
    for (const auto& window : train_windows) {
        size_t begin = prep.bundles.size();
        for (const auto& flow : window.flows) prep.bundles.push_back(make_bundle(flow, config));
        prep.window_ranges.emplace_back(begin, prep.bundles.size());
    }
    if (prep.bundles.empty()) throw EvalError("no training flows to cluster");
    prep.matrix = pairwise_distances(prep.bundles, config, jobs);
    prep.linkage = Linkage::build(prep.matrix);
    return prep;
}

/// Training instances via matrix lookups: assigning a training flow to the
/// nearest leader only needs already-computed pairwise distances.
std::vector<ActionInstance> training_instances(const ClusteredTraining& prep,
                                               std::span<const ActionWindow> train_windows,
                                               const ClusterModel& model) {
    std::vector<ActionInstance> instances;
    instances.reserve(train_windows.size());
    for (size_t w = 0; w < train_windows.size(); ++w) {
        ActionInstance instance;
        instance.label = train_windows[w].label;
        instance.account = train_windows[w].account;
        instance.features.assign(static_cast<size_t>(model.k), 0);
        auto [begin, end] = prep.window_ranges[w];
        for (size_t i = begin; i < end; ++i) {
            int best = 0;
            double best_dist =
                prep.matrix(i, static_cast<size_t>(model.leader_indices[0]));
            for (int c = 1; c < model.k; ++c) {
                double dist =
                    prep.matrix(i, static_cast<size_t>(model.leader_indices[static_cast<size_t>(c)]));
                if (dist < best_dist) {
                    best_dist = dist;
                    best = c;
                }
            }
            ++instance.features[static_cast<size_t>(best)];
        }
        instances.push_back(std::move(instance));
    }
    return instances;
}

std::vector<ActionInstance> assigned_instances(std::span<const ActionWindow> windows,
                                               const ClusterModel& model, int jobs) {
    std::vector<ActionInstance> instances(windows.size());
    parallel_for(windows.size(), jobs,
                 [&](size_t w) { instances[w] = build_instance(windows[w], model); });
    return instances;
}

SweepResult run_sweep(const ClusteredTraining& prep, std::span<const ActionWindow> train_windows,
                      std::span<const ActionWindow> validation_windows,
                      const DistanceConfig& config, std::span<const int> k_range,
                      const ForestParams& params, int jobs) {
    if (k_range.empty()) throw EvalError("cluster sweep needs at least one candidate k");
    if (validation_windows.empty()) throw EvalError("cluster sweep requires validation windows");
    for (int k : k_range) {
        if (k < 1 || static_cast<size_t>(k) > prep.bundles.size())
            throw EvalError("candidate k=" + std::to_string(k) + " exceeds " +
                            std::to_string(prep.bundles.size()) + " training flows");
    }

    SweepResult result;
    for (int k : k_range) {
        ClusterModel model = make_cluster_model(config, k, prep.linkage, prep.matrix, prep.bundles);
        auto train_data = training_instances(prep, train_windows, model);
        ForestModel forest = train_forest(train_data, params, jobs);
        auto validation_data = assigned_instances(validation_windows, model, jobs);
        EvalReport report = evaluate(forest, validation_data);
        result.curve.push_back(SweepPoint{k, report.macro_f1});
    }
    result.best_k = result.curve[0].k;
    double best_f = result.curve[0].macro_f1;
    for (const auto& point : result.curve) {
        if (point.macro_f1 > best_f) {
            best_f = point.macro_f1;
            result.best_k = point.k;
        }
    }
    return result;
}

}  // namespace

EvalReport evaluate(const ForestModel& model, std::span<const ActionInstance> instances) {
    ConfusionMatrix confusion(model.labels);
    for (const auto& instance : instances) {
        confusion.add(instance.label, model.predict(instance.features));
    }
    return metrics(confusion);
}

SweepResult sweep_clusters(std::span<const ActionWindow> train_windows,
                           std::span<const ActionWindow> validation_windows,
                           const DistanceConfig& config, std::span<const int> k_range,
                           const ForestParams& params, int jobs) {
    ClusteredTraining prep = prepare_training(train_windows, config, jobs);
    return run_sweep(prep, train_windows, validation_windows, config, k_range, params, jobs);
}

std::vector<ActionWindow> load_windows(const ExperimentConfig& config, PipelineStats* stats) {
    PipelineStats local;
    CsvSchema schema = config.csv_columns ? CsvSchema::from_names(*config.csv_columns)
                                          : CsvSchema::default_schema();
    DeviceConfig device{parse_ipv4(config.device_ip), config.timeout_seconds};

    OwnerMap owners = OwnerMap::parse(read_file(config.owner_map));
    owners.target_owners.insert(config.target_owners.begin(), config.target_owners.end());
    if (owners.target_owners.empty()) throw ConfigError("no target owners configured");

    std::vector<Flow> flows;
    for (const auto& capture_path : config.captures) {
        auto packets = parse_capture(read_file(capture_path), schema);
        local.packets += packets.size();
        AssemblyResult assembled = assemble_flows(std::move(packets), device);
        local.non_tcp += assembled.dropped_non_tcp;
        local.foreign += assembled.dropped_foreign;
        for (auto& flow : assembled.flows) flows.push_back(std::move(flow));
    }
    local.flows = flows.size();

    std::vector<LabelEntry> entries;
    for (const auto& label_path : config.labels) {
        auto parsed = parse_labels(read_file(label_path));
        entries.insert(entries.end(), parsed.begin(), parsed.end());
    }
    local.unmatched_labels = apply_labels(flows, entries);

    DomainFilterResult domain = domain_filter(std::move(flows), owners);
    local.domain_dropped = domain.dropped;
    std::vector<Flow> kept = packet_filter_all(std::move(domain.flows));
    local.flows_kept = kept.size();

    auto windows = group_windows(kept, config.window_gap());
    local.windows = windows.size();
    if (stats) *stats = local;
    return windows;
}

namespace {

std::string format_double(double value, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, value);
    return buf;
}

std::string render_report(const ExperimentConfig& config, const ExperimentResult& result) {
    const EvalReport& report = result.report;
    std::string out;
    out += "experiment: " + config.name + "\n";
    out += "distance config: " + config.distance.name + " (" +
           std::to_string(config.distance.views.size()) + " views)\n";
    if (!result.sweep.curve.empty()) {
        out += "clusters: k=" + std::to_string(result.k) + " (chosen by sweep over " +
               std::to_string(result.sweep.curve.front().k) + ".." +
               std::to_string(result.sweep.curve.back().k) + ")\n";
    } else {
        out += "clusters: k=" + std::to_string(result.k) + " (fixed)\n";
    }
    out += "forest: " + std::to_string(result.forest_model.params.n_estimators) +
           " trees, max_features " + std::to_string(result.forest_model.params.max_features) +
           ", bootstrap " + (result.forest_model.params.bootstrap ? "on" : "off") + ", seed " +
           std::to_string(result.forest_model.params.seed) + "\n";
    out += "packets: " + std::to_string(result.stats.packets) + " (non-tcp " +
           std::to_string(result.stats.non_tcp) + ", foreign " +
           std::to_string(result.stats.foreign) + ")\n";
    out += "flows: assembled " + std::to_string(result.stats.flows) + ", domain-dropped " +
           std::to_string(result.stats.domain_dropped) + ", kept " +
           std::to_string(result.stats.flows_kept) + "\n";
    out += "windows: train " + std::to_string(result.split_sizes.train.size()) + ", validation " +
           std::to_string(result.split_sizes.validation.size()) + ", test " +
           std::to_string(result.split_sizes.test.size()) + "\n";
    out += "\n";

    size_t width = 12;
    for (const auto& label : report.confusion.labels) width = std::max(width, label.size() + 2);
    auto pad = [&](const std::string& s) {
        std::string padded = s;
        padded.resize(width, ' ');
        return padded;
    };
    out += pad("class") + "precision  recall     f1         support\n";
    for (size_t c = 0; c < report.confusion.labels.size(); ++c) {
        int64_t support = 0;
        for (int64_t v : report.confusion.counts[c]) support += v;
        out += pad(report.confusion.labels[c]) + format_double(report.per_class[c].precision) +
               "   " + format_double(report.per_class[c].recall) + "   " +
               format_double(report.per_class[c].f1) + "   " + std::to_string(support) + "\n";
    }
    out += pad("macro") + format_double(report.macro_precision) + "   " +
           format_double(report.macro_recall) + "   " + format_double(report.macro_f1) + "\n";
    out += "accuracy: " + format_double(report.accuracy) + "\n";
    return out;
}

}  // namespace

namespace {

ExperimentResult run_pipeline(const ExperimentConfig& config, int jobs, bool quiet,
                              bool with_test) {
    config.distance.validate();
    auto progress = [&](const std::string& message) {
        if (!quiet) std::fprintf(stderr, "[%s] %s\n", config.name.c_str(), message.c_str());
    };

    ExperimentResult result;
    progress("ingesting captures");
    auto windows = load_windows(config, &result.stats);

    Split split;
    if (with_test) {
        split = split_by_account(windows, config.test_accounts, config.validation_accounts);
    } else {
        // Held-out accounts still leave the training set, but an empty test
        // set is fine when nothing gets evaluated.
        for (const auto& account : config.test_accounts) {
            if (config.validation_accounts.count(account))
                throw EvalError("account '" + account +
                                "' appears in both test and validation sets");
        }
        for (auto& window : windows) {
            if (config.test_accounts.count(window.account)) split.test.push_back(window);
            else if (config.validation_accounts.count(window.account))
                split.validation.push_back(window);
            else split.train.push_back(window);
        }
    }

    progress("computing training distances (" + std::to_string(split.train.size()) + " windows)");
    ClusteredTraining prep = prepare_training(split.train, config.distance, jobs);

    ForestParams forest_params = config.forest;
    if (forest_params.seed == 0) forest_params.seed = config.seed;

    int chosen_k = config.clusters;
    if (!config.cluster_range.empty()) {
        progress("sweeping cluster counts");
        result.sweep = run_sweep(prep, split.train, split.validation, config.distance,
                                 config.cluster_range, forest_params, jobs);
        chosen_k = result.sweep.best_k;
    }
    if (chosen_k < 1)
        throw ConfigError("no cluster count configured (set 'clusters' or 'cluster_range')");
    result.k = chosen_k;

    progress("building final model at k=" + std::to_string(chosen_k));
    result.cluster_model =
        make_cluster_model(config.distance, chosen_k, prep.linkage, prep.matrix, prep.bundles);
    auto train_data = training_instances(prep, split.train, result.cluster_model);
    result.forest_model = train_forest(train_data, forest_params, jobs);

    std::vector<ActionInstance> test_data;
    if (with_test) {
        progress("evaluating on test accounts");
        test_data = assigned_instances(split.test, result.cluster_model, jobs);
        result.report = evaluate(result.forest_model, test_data);
    }

    std::vector<ActionInstance> validation_data;
    if (!split.validation.empty())
        validation_data = assigned_instances(split.validation, result.cluster_model, jobs);

    result.split_sizes = std::move(split);

    if (!config.output_dir.empty()) {
        const auto& dir = config.output_dir;
        std::filesystem::create_directories(dir);
        if (with_test) {
            write_file(dir / "report.txt", render_report(config, result));
            write_file(dir / "confusion.csv", result.report.confusion.to_csv());
        }
        if (!result.sweep.curve.empty()) {
            std::string curve = "k,macro_f\n";
            for (const auto& point : result.sweep.curve) {
                curve += std::to_string(point.k) + ',' + format_double(point.macro_f1, 9) + '\n';
            }
            write_file(dir / "curve.csv", curve);
        }
        result.cluster_model.save(dir / "cluster_model.json");
        result.forest_model.save(dir / "forest_model.json");
        write_file(dir / "dataset_train.csv", write_dataset(train_data, result.k));
        if (!validation_data.empty())
            write_file(dir / "dataset_validation.csv", write_dataset(validation_data, result.k));
        if (with_test) write_file(dir / "dataset_test.csv", write_dataset(test_data, result.k));
    }
    return result;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, int jobs, bool quiet) {
    return run_pipeline(config, jobs, quiet, true);
}

ExperimentResult run_training(const ExperimentConfig& config, int jobs, bool quiet) {
    return run_pipeline(config, jobs, quiet, false);
}

std::vector<ClassifiedWindow> classify_capture(const std::string& capture_csv,
                                               const ClusterModel& cluster_model,
                                               const ForestModel& forest_model,
                                               const DeviceConfig& device, const OwnerMap& owners,
                                               double gap_seconds) {
    auto packets = parse_capture(capture_csv, CsvSchema::default_schema());
    AssemblyResult assembled = assemble_flows(std::move(packets), device);
    DomainFilterResult domain = domain_filter(std::move(assembled.flows), owners);
    std::vector<Flow> flows = packet_filter_all(std::move(domain.flows));
    std::stable_sort(flows.begin(), flows.end(),
                     [](const Flow& a, const Flow& b) { return a.start_time < b.start_time; });

    std::vector<ClassifiedWindow> out;
    std::vector<ActionWindow> segments;
    for (const auto& flow : flows) {
        if (segments.empty() ||
            flow.start_time - segments.back().flows.back().start_time > gap_seconds) {
            ActionWindow window;
            window.start = flow.start_time;
            window.end = flow.end_time;
            segments.push_back(std::move(window));
        }
        auto& window = segments.back();
        window.flows.push_back(flow);
        window.start = std::min(window.start, flow.start_time);
        window.end = std::max(window.end, flow.end_time);
    }
    for (const auto& segment : segments) {
        ActionInstance instance = build_instance(segment, cluster_model);
        ClassifiedWindow cw;
        cw.start = segment.start;
        cw.end = segment.end;
        cw.flow_count = segment.flows.size();
        cw.label = forest_model.predict(instance.features);
        out.push_back(std::move(cw));
    }
    return out;
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text,
                                             const std::filesystem::path& base_dir) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) throw ConfigError("experiment config is not valid JSON");

    ExperimentConfig config;
    config.name = j.value("name", std::string("experiment"));
    auto resolve = [&](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || base_dir.empty() ? path : base_dir / path;
    };

    if (!j.contains("captures")) throw ConfigError("config needs 'captures'");
    for (const auto& p : j.at("captures")) config.captures.push_back(resolve(p.get<std::string>()));
    for (const auto& p : j.value("labels", json::array()))
        config.labels.push_back(resolve(p.get<std::string>()));
    if (!j.contains("owner_map")) throw ConfigError("config needs 'owner_map'");
    config.owner_map = resolve(j.at("owner_map").get<std::string>());
    for (const auto& owner : j.value("target_owners", json::array()))
        config.target_owners.push_back(owner.get<std::string>());
    if (!j.contains("device_ip")) throw ConfigError("config needs 'device_ip'");
    config.device_ip = j.at("device_ip").get<std::string>();
    config.timeout_seconds = j.value("timeout_seconds", 4.5);
    if (config.timeout_seconds <= 0.0) throw ConfigError("timeout_seconds must be positive");
    config.window_gap_seconds = j.value("window_gap_seconds", 0.0);
    if (j.contains("csv_columns"))
        config.csv_columns = j.at("csv_columns").get<std::vector<std::string>>();

    if (!j.contains("distance")) throw ConfigError("config needs 'distance'");
    const auto& dist = j.at("distance");
    if (dist.contains("preset")) {
        config.distance = distance_preset(dist.at("preset").get<std::string>());
    } else {
        config.distance.name = dist.value("name", std::string("custom"));
        for (const auto& view_json : dist.at("views")) {
            SeriesView view;
            view.weight = view_json.at("weight").get<double>();
            view.type = parse_series_type(view_json.at("series").get<std::string>());
            view.interval.x = view_json.at("interval").at(0).get<int>();
            view.interval.y = view_json.at("interval").at(1).get<int>();
            config.distance.views.push_back(view);
        }
    }
    config.distance.validate();

    config.clusters = j.value("clusters", 0);
    if (j.contains("cluster_range")) {
        const auto& range = j.at("cluster_range");
        if (!range.is_array() || range.size() != 2)
            throw ConfigError("'cluster_range' must be [lo, hi]");
        int lo = range.at(0).get<int>();
        int hi = range.at(1).get<int>();
        if (lo < 1 || hi < lo) throw ConfigError("bad cluster_range");
        for (int k = lo; k <= hi; ++k) config.cluster_range.push_back(k);
    }

    config.seed = j.value("seed", uint64_t{1});
    if (j.contains("forest")) {
        const auto& f = j.at("forest");
        config.forest.n_estimators = f.value("n_estimators", 40);
        config.forest.max_features = f.value("max_features", 0);
        config.forest.bootstrap = f.value("bootstrap", true);
        config.forest.seed = f.value("seed", uint64_t{0});
    }

    if (j.contains("split")) {
        const auto& split = j.at("split");
        for (const auto& account : split.value("test_accounts", json::array()))
            config.test_accounts.insert(account.get<std::string>());
        for (const auto& account : split.value("validation_accounts", json::array()))
            config.validation_accounts.insert(account.get<std::string>());
    }
    if (j.contains("output_dir")) config.output_dir = resolve(j.at("output_dir").get<std::string>());
    return config;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    return from_json(read_file(path), path.parent_path());
}

}  // namespace netact
