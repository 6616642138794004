// netact: infer user actions from encrypted mobile-app traffic metadata.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "netact/errors.hpp"
#include "netact/eval.hpp"
#include "netact/fileio.hpp"
#include "netact/kernels/kernels.hpp"
#include "netact/parallel.hpp"
#include "netact/synthgen.hpp"

namespace fs = std::filesystem;
using namespace netact;

namespace {

struct CommonOptions {
    int jobs = default_jobs();
    bool quiet = false;
    std::string backend;
    uint64_t seed = 0;
    bool seed_set = false;
};

void apply_common(const CommonOptions& common) {
    if (common.backend == "scalar") kernels::set_backend(kernels::Backend::Scalar);
    else if (common.backend == "avx2") kernels::set_backend(kernels::Backend::Avx2);
    else if (!common.backend.empty())
        throw ConfigError("unknown backend '" + common.backend + "' (scalar|avx2)");
}

ExperimentConfig load_config(const std::string& path, const CommonOptions& common) {
    ExperimentConfig config = ExperimentConfig::load(path);
    if (common.seed_set) {
        config.seed = common.seed;
        config.forest.seed = 0;  // re-derive from the experiment seed
    }
    return config;
}

// A ready-to-run experiment config pointing at the files synth just wrote.
std::string experiment_template(const ScenarioSpec& spec, const SynthOutput& out) {
    // Hold out the last accounts: two each for test/validation when there are
    // enough, one each otherwise, always leaving at least one to train on.
    std::string test_accounts, validation_accounts;
    if (spec.accounts >= 6) {
        test_accounts = "\"acc" + std::to_string(spec.accounts - 1) + "\", \"acc" +
                        std::to_string(spec.accounts - 2) + "\"";
        validation_accounts = "\"acc" + std::to_string(spec.accounts - 3) + "\", \"acc" +
                              std::to_string(spec.accounts - 4) + "\"";
    } else if (spec.accounts >= 3) {
        test_accounts = "\"acc" + std::to_string(spec.accounts - 1) + "\"";
        validation_accounts = "\"acc" + std::to_string(spec.accounts - 2) + "\"";
    }
    std::string owners;
    for (const auto& owner : out.target_owners) {
        if (!owners.empty()) owners += ", ";
        owners += '"' + owner + '"';
    }
    return std::string("{\n") +
           "  \"name\": \"synthetic\",\n" +
           "  \"captures\": [\"capture.csv\"],\n" +
           "  \"labels\": [\"labels.csv\"],\n" +
           "  \"owner_map\": \"owners.csv\",\n" +
           "  \"target_owners\": [" + owners + "],\n" +
           "  \"device_ip\": \"" + out.device_ip + "\",\n" +
           "  \"timeout_seconds\": 4.5,\n" +
           "  \"distance\": {\"preset\": \"gmail-conf1\"},\n" +
           "  \"cluster_range\": [4, 24],\n" +
           "  \"forest\": {\"n_estimators\": 40, \"bootstrap\": true},\n" +
           "  \"seed\": " + std::to_string(spec.seed) + ",\n" +
           "  \"split\": {\"test_accounts\": [" + test_accounts +
           "], \"validation_accounts\": [" + validation_accounts + "]},\n" +
           "  \"output_dir\": \"out\"\n}\n";
}

int cmd_synth(const std::string& scenario_path, bool demo, bool benchmark,
              const std::string& out_dir, const CommonOptions& common) {
    ScenarioSpec spec;
    if (demo) spec = demo_scenario();
    else if (benchmark) spec = benchmark_scenario(common.seed_set ? common.seed : 1);
    else if (!scenario_path.empty()) spec = ScenarioSpec::from_json(read_file(scenario_path));
    else throw ConfigError("synth needs --scenario FILE, --demo or --benchmark");
    if (common.seed_set) spec.seed = common.seed;

    SynthOutput out = generate(spec);
    fs::path dir(out_dir);
    write_file(dir / "capture.csv", out.capture_csv);
    write_file(dir / "labels.csv", out.labels_csv);
    write_file(dir / "owners.csv", out.owner_map_csv);
    write_file(dir / "experiment.json", experiment_template(spec, out));
    if (!common.quiet) {
        std::printf("wrote %s/{capture,labels,owners}.csv and experiment.json\n",
                    dir.string().c_str());
        std::printf("windows: %zu, labeled flows: %zu\n",
                    static_cast<size_t>(spec.accounts) * spec.sequences_per_account *
                        spec.templates.size(),
                    parse_labels(out.labels_csv).size());
    }
    return 0;
}

int cmd_ingest(const std::string& config_path, const CommonOptions& common) {
    ExperimentConfig config = load_config(config_path, common);
    PipelineStats stats;
    auto windows = load_windows(config, &stats);

    std::string summary = "flow_start,flow_key,packets,label,account\n";
    char buf[64];
    for (const auto& window : windows) {
        for (const auto& flow : window.flows) {
            std::snprintf(buf, sizeof(buf), "%.6f", flow.start_time);
            summary += buf;
            summary += ',' + format_flow_key(flow.key) + ',' +
                       std::to_string(flow.packets.size()) + ',' + flow.label.value_or("") + ',' +
                       flow.account.value_or("") + '\n';
        }
    }
    if (!config.output_dir.empty()) write_file(config.output_dir / "flows.csv", summary);

    std::printf("packets: %zu (non-tcp %zu, foreign %zu)\n", stats.packets, stats.non_tcp,
                stats.foreign);
    std::printf("flows: %zu assembled, %zu dropped by domain filter, %zu kept\n", stats.flows,
                stats.domain_dropped, stats.flows_kept);
    std::printf("labels without a matching flow: %zu\n", stats.unmatched_labels);
    std::printf("windows: %zu\n", stats.windows);
    return 0;
}

void print_report(const ExperimentResult& result) {
    std::printf("clusters: k=%d%s\n", result.k,
                result.sweep.curve.empty() ? "" : " (from sweep)");
    std::printf("macro precision %.4f, recall %.4f, F %.4f, accuracy %.4f\n",
                result.report.macro_precision, result.report.macro_recall,
                result.report.macro_f1, result.report.accuracy);
}

int cmd_train(const std::string& config_path, const CommonOptions& common) {
    ExperimentConfig config = load_config(config_path, common);
    ExperimentResult result = run_training(config, common.jobs, common.quiet);
    std::printf("trained cluster model (k=%d) and forest (%d trees) -> %s\n", result.k,
                result.forest_model.params.n_estimators, config.output_dir.string().c_str());
    if (!result.sweep.curve.empty()) std::printf("best_k %d\n", result.sweep.best_k);
    return 0;
}

int cmd_eval(const std::string& config_path, const CommonOptions& common) {
    ExperimentConfig config = load_config(config_path, common);
    ExperimentResult result = run_experiment(config, common.jobs, common.quiet);
    print_report(result);
    if (!config.output_dir.empty())
        std::printf("artifacts in %s\n", config.output_dir.string().c_str());
    return 0;
}

int cmd_sweep(const std::string& config_path, const CommonOptions& common) {
    ExperimentConfig config = load_config(config_path, common);
    if (config.cluster_range.empty())
        throw ConfigError("sweep needs 'cluster_range' in the config");
    ExperimentResult result = run_training(config, common.jobs, common.quiet);
    std::printf("best_k %d\n", result.sweep.best_k);
    if (!config.output_dir.empty())
        std::printf("curve written to %s\n", (config.output_dir / "curve.csv").string().c_str());
    return 0;
}

int cmd_classify(const std::string& config_path, const std::string& capture_path,
                 std::string cluster_model_path, std::string forest_model_path,
                 const std::string& out_path, const CommonOptions& common) {
    ExperimentConfig config = load_config(config_path, common);
    if (cluster_model_path.empty())
        cluster_model_path = (config.output_dir / "cluster_model.json").string();
    if (forest_model_path.empty())
        forest_model_path = (config.output_dir / "forest_model.json").string();

    ClusterModel cluster_model = ClusterModel::load(cluster_model_path);
    ForestModel forest_model = ForestModel::load(forest_model_path);
    OwnerMap owners = OwnerMap::parse(read_file(config.owner_map));
    owners.target_owners.insert(config.target_owners.begin(), config.target_owners.end());
    DeviceConfig device{parse_ipv4(config.device_ip), config.timeout_seconds};

    auto classified = classify_capture(read_file(capture_path), cluster_model, forest_model,
                                       device, owners, config.window_gap());

    std::string csv = "window_start,window_end,flows,label\n";
    char buf[64];
    for (const auto& window : classified) {
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,", window.start, window.end);
        csv += buf;
        csv += std::to_string(window.flow_count) + ',' + window.label + '\n';
    }
    if (!out_path.empty()) {
        write_file(out_path, csv);
        std::printf("classified %zu windows -> %s\n", classified.size(), out_path.c_str());
    } else {
        std::fputs(csv.c_str(), stdout);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"infer user actions from encrypted traffic metadata"};
    app.require_subcommand(1);
    app.failure_message(CLI::FailureMessage::help);
    app.fallthrough();  // global flags may appear after the subcommand
    app.footer(
        "Experiment config keys (JSON):\n"
        "  name                 experiment label used in reports\n"
        "  captures             list of capture CSV paths\n"
        "  labels               list of label sidecar paths (flow_start,flow_key,label,account)\n"
        "  owner_map            CIDR,owner allowlist file\n"
        "  target_owners        owners whose flows belong to the analyzed app\n"
        "  device_ip            the monitored device (flow client side)\n"
        "  timeout_seconds      inactivity gap that terminates a flow (default 4.5)\n"
        "  window_gap_seconds   window grouping gap (default: timeout_seconds)\n"
        "  csv_columns          optional capture column order\n"
        "  distance             {\"preset\": name} or {name, views:[{weight,series,interval}]}\n"
        "  clusters             fixed cluster count\n"
        "  cluster_range        [lo, hi] candidate cluster counts (enables the sweep)\n"
        "  forest               {n_estimators, max_features, bootstrap, seed}\n"
        "  seed                 experiment seed (forest inherits it unless set)\n"
        "  split                {test_accounts: [...], validation_accounts: [...]}\n"
        "  output_dir           where reports, models and datasets are written\n"
        "\n"
        "Scenario spec keys (JSON, for synth):\n"
        "  templates            [{label, window_duration, flows:[{series,jitter,drop_prob}]}]\n"
        "  accounts, sequences_per_account, noise_flows_per_window, seed, device_ip\n");

    CommonOptions common;
    app.add_option("--jobs", common.jobs, "worker threads")->capture_default_str();
    app.add_flag("--quiet", common.quiet, "suppress progress output");
    app.add_option("--backend", common.backend, "kernel backend: scalar or avx2");
    auto* seed_opt = app.add_option("--seed", common.seed, "override the config/scenario seed");

    auto* synth = app.add_subcommand("synth", "generate a labeled synthetic capture");
    std::string scenario_path, synth_out = ".";
    bool demo = false, benchmark = false;
    synth->add_option("--scenario", scenario_path, "scenario spec (JSON)");
    synth->add_flag("--demo", demo, "use the built-in three-action demo scenario");
    synth->add_flag("--benchmark", benchmark, "use the built-in 7-class benchmark scenario");
    synth->add_option("--out-dir", synth_out, "output directory")->capture_default_str();

    std::string config_path;
    auto* ingest = app.add_subcommand("ingest", "parse captures and report flow/window stats");
    ingest->add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* train = app.add_subcommand("train", "train and persist cluster + forest models");
    train->add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* eval_cmd =
        app.add_subcommand("eval", "run the full experiment and evaluate on test accounts");
    eval_cmd->add_option("--config", config_path, "experiment config (JSON)")->required();
    auto* sweep =
        app.add_subcommand("sweep", "score candidate cluster counts on validation accounts");
    sweep->add_option("--config", config_path, "experiment config (JSON)")->required();

    auto* classify = app.add_subcommand("classify", "label windows of an unlabeled capture");
    std::string capture_path, cluster_model_path, forest_model_path, classify_out;
    classify->add_option("--config", config_path, "experiment config (JSON)")->required();
    classify->add_option("--capture", capture_path, "capture CSV to classify")->required();
    classify->add_option("--cluster-model", cluster_model_path,
                         "cluster model path (default: <output_dir>/cluster_model.json)");
    classify->add_option("--forest-model", forest_model_path,
                         "forest model path (default: <output_dir>/forest_model.json)");
    classify->add_option("--out", classify_out, "write window labels here instead of stdout");

    CLI11_PARSE(app, argc, argv);
    common.seed_set = seed_opt->count() > 0;

    try {
        apply_common(common);
        if (synth->parsed()) return cmd_synth(scenario_path, demo, benchmark, synth_out, common);
        if (ingest->parsed()) return cmd_ingest(config_path, common);
        if (train->parsed()) return cmd_train(config_path, common);
        if (eval_cmd->parsed()) return cmd_eval(config_path, common);
        if (sweep->parsed()) return cmd_sweep(config_path, common);
        if (classify->parsed())
            return cmd_classify(config_path, capture_path, cluster_model_path, forest_model_path,
                                classify_out, common);
    } catch (const Error& e) {
        std::fprintf(stderr, "netact: [%s] %s\n", e.stage().c_str(), e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "netact: [internal] %s\n", e.what());
        return 2;
    }
    return 0;
}
