// Acceptance suite: runs every criterion at its stated tolerance and prints
// one PASS/FAIL line per criterion. Exit code = number of failures.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "netact/capture_csv.hpp"
#include "netact/dtw.hpp"
#include "netact/eval.hpp"
#include "netact/fileio.hpp"
#include "netact/filter.hpp"
#include "netact/flows.hpp"
#include "netact/forest.hpp"
#include "netact/metrics.hpp"
#include "netact/owners.hpp"
#include "netact/parallel.hpp"
#include "netact/rng.hpp"
#include "netact/series.hpp"
#include "netact/synthgen.hpp"
#include "support/oracles.hpp"

namespace fs = std::filesystem;
using namespace netact;

namespace {

struct Criterion {
    int id;
    std::string title;
    std::function<std::string()> body;  // returns "" on success, else the failure reason
};

#define EXPECT(cond, message)                      \
    do {                                           \
        if (!(cond)) return std::string(message);  \
    } while (0)

std::vector<Flow> pipeline_flows(const SynthOutput& out, double timeout = 4.5) {
    auto packets = parse_capture(out.capture_csv, CsvSchema::default_schema());
    DeviceConfig device{parse_ipv4(out.device_ip), timeout};
    auto assembled = assemble_flows(std::move(packets), device);
    auto entries = parse_labels(out.labels_csv);
    apply_labels(assembled.flows, entries);
    OwnerMap owners = OwnerMap::parse(out.owner_map_csv);
    owners.target_owners.insert(out.target_owners.begin(), out.target_owners.end());
    auto domain = domain_filter(std::move(assembled.flows), owners);
    return packet_filter_all(std::move(domain.flows));
}

// --- criterion 1 -----------------------------------------------------------

std::string criterion1_reference_series() {
    const std::map<std::string, std::array<ByteSeries, 3>> expected = {
        {"action-a",
         {ByteSeries{1514, 1514, 315, 113, 477},
          ByteSeries{282, 188, 514, 96, 1514, 179, 603, 98, 801, 98},
          ByteSeries{282, -1514, -1514, -315, 188, -113, 514, 96, 1514, 179, 603, 98, 801, 98,
                     -477}}},
        {"action-b",
         {ByteSeries{1514, 1514, 1266, 582, 113, 661}, ByteSeries{282, 188, 692, 423},
          ByteSeries{282, -1514, -1514, -1266, -582, 188, -113, 692, 423, -661}}},
        {"action-c",
         {ByteSeries{1245, 1514, 107, 465, 172, 111},
          ByteSeries{926, 655, 136, 913, 1514, 1514, 863},
          ByteSeries{926, 655, 136, -1245, 913, 1514, 1514, 863, -1514, -107, -465, -172,
                     -111}}},
    };

    SynthOutput out = generate(demo_scenario());
    auto flows = pipeline_flows(out);
    EXPECT(flows.size() == 9, "expected 9 flows (3 accounts x 3 actions)");

    for (const auto& flow : flows) {
        EXPECT(flow.label.has_value(), "flow lost its label");
        const auto& series = expected.at(*flow.label);
        EXPECT(to_series(flow, SeriesType::Incoming) == series[0], "incoming series mismatch");
        EXPECT(to_series(flow, SeriesType::Outgoing) == series[1], "outgoing series mismatch");
        EXPECT(to_series(flow, SeriesType::Complete) == series[2], "complete series mismatch");
    }
    return "";
}

// --- criterion 2 -----------------------------------------------------------

std::string criterion2_dtw_oracle() {
    Rng rng(0xD70001);
    for (int round = 0; round < 500; ++round) {
        ByteSeries x(1 + rng.next_below(6));
        ByteSeries y(1 + rng.next_below(6));
        for (auto& v : x) v = static_cast<int32_t>(rng.next_int(-1600, 1600));
        for (auto& v : y) v = static_cast<int32_t>(rng.next_int(-1600, 1600));
        int64_t fast = dtw_cost(x, y);
        int64_t exact = testing::dtw_enumerate_oracle(x, y);
        EXPECT(fast == exact, "dtw_cost diverged from exhaustive enumeration (pair " +
                                  std::to_string(round) + ": " + std::to_string(fast) +
                                  " != " + std::to_string(exact) + ")");
    }
    return "";
}

// --- criterion 3 -----------------------------------------------------------

std::string criterion3_linkage_and_leaders() {
    Rng rng(0xC10057);
    for (int round = 0; round < 50; ++round) {
        size_t n = 2 + rng.next_below(19);
        DistanceMatrix d(n);
        for (size_t i = 0; i < n; ++i)
            for (size_t j = i + 1; j < n; ++j) d.set(i, j, rng.next_double() * 100.0);

        Linkage linkage = Linkage::build(d);
        auto naive = testing::naive_average_linkage(d);
        EXPECT(linkage.steps().size() == naive.size(), "merge count mismatch");
        for (size_t s = 0; s < naive.size(); ++s) {
            EXPECT(linkage.steps()[s].left_rep == naive[s].left_rep &&
                       linkage.steps()[s].right_rep == naive[s].right_rep,
                   "merge pair differs from naive recomputation at step " + std::to_string(s));
            EXPECT(std::abs(linkage.steps()[s].distance - naive[s].distance) <= 1e-9,
                   "linkage distance off by more than 1e-9 at step " + std::to_string(s));
        }

        for (int k : {1, 2, 5}) {
            if (static_cast<size_t>(k) > n) continue;
            auto membership = linkage.cut(k);
            std::vector<std::vector<int>> clusters(static_cast<size_t>(k));
            for (size_t i = 0; i < n; ++i)
                clusters[static_cast<size_t>(membership[i])].push_back(static_cast<int>(i));
            for (const auto& members : clusters) {
                int leader = elect_leader(members, d);
                double leader_sum = 0.0;
                for (int j : members) leader_sum += d((size_t)leader, (size_t)j);
                for (int i : members) {
                    double sum = 0.0;
                    for (int j : members) sum += d((size_t)i, (size_t)j);
                    EXPECT(sum + 1e-12 >= leader_sum, "elected leader is not minimal");
                }
            }
        }
    }
    return "";
}

// --- criterion 4 -----------------------------------------------------------

std::string criterion4_forest_sanity() {
    std::vector<ActionInstance> data;
    Rng rng(0xF00357);
    for (int i = 0; i < 30; ++i) {
        data.push_back({"quiet", "acc", {int(rng.next_below(2)), int(rng.next_below(3))}});
        data.push_back({"busy", "acc", {6 + int(rng.next_below(3)), int(rng.next_below(3))}});
    }
    ForestParams params;
    params.n_estimators = 40;
    params.seed = 99;

    ForestModel model = train_forest(data, params, 2);
    for (const auto& instance : data) {
        EXPECT(model.predict(instance.features) == instance.label,
               "training accuracy below 100% on separable data");
    }

    ForestModel again = train_forest(data, params, 1);
    EXPECT(model.to_json() == again.to_json(),
           "same data and seed did not give byte-identical serialized models");

    for (int round = 0; round < 1000; ++round) {
        std::vector<int> features = {int(rng.next_below(10)), int(rng.next_below(10))};
        auto proba = model.predict_proba(features);
        double sum = 0.0;
        size_t argmax = 0;
        for (size_t c = 0; c < proba.size(); ++c) {
            sum += proba[c];
            if (proba[c] > proba[argmax]) argmax = c;
        }
        EXPECT(std::abs(sum - 1.0) <= 1e-9, "probabilities do not sum to 1");
        EXPECT(model.predict(features) == model.labels[argmax],
               "predict disagrees with argmax(predict_proba)");
    }
    return "";
}

// --- criterion 5 -----------------------------------------------------------

std::string criterion5_metrics_oracle() {
    {
        ConfusionMatrix m({"a", "b", "c"});
        m.add("a", "a", 3);
        m.add("b", "b", 4);
        m.add("c", "c", 5);
        EvalReport r = metrics(m);
        for (const auto& c : r.per_class) {
            EXPECT(c.precision == 1.0 && c.recall == 1.0 && c.f1 == 1.0,
                   "perfect diagonal did not yield all 1.0");
        }
        EXPECT(r.macro_f1 == 1.0, "perfect diagonal macro F != 1.0");
    }

    Rng rng(0x4E7215);
    for (int round = 0; round < 20; ++round) {
        size_t n = 2 + rng.next_below(6);
        std::vector<std::string> labels;
        for (size_t i = 0; i < n; ++i) labels.push_back("c" + std::to_string(i));
        ConfusionMatrix m(labels);
        for (size_t r = 0; r < n; ++r)
            for (size_t c = 0; c < n; ++c) m.counts[r][c] = (int64_t)rng.next_below(40);

        EvalReport report = metrics(m);
        double macro_p = 0, macro_r = 0, macro_f = 0;
        for (size_t c = 0; c < n; ++c) {
            int64_t tp = m.counts[c][c], fp = 0, fn = 0;
            for (size_t r = 0; r < n; ++r) {
                if (r == c) continue;
                fp += m.counts[r][c];
                fn += m.counts[c][r];
            }
            double p = tp + fp == 0 ? 0.0 : double(tp) / double(tp + fp);
            double rc = tp + fn == 0 ? 0.0 : double(tp) / double(tp + fn);
            double f = p + rc == 0.0 ? 0.0 : 2.0 * p * rc / (p + rc);
            EXPECT(std::abs(report.per_class[c].precision - p) <= 1e-9, "precision mismatch");
            EXPECT(std::abs(report.per_class[c].recall - rc) <= 1e-9, "recall mismatch");
            EXPECT(std::abs(report.per_class[c].f1 - f) <= 1e-9, "f1 mismatch");
            macro_p += p;
            macro_r += rc;
            macro_f += f;
        }
        EXPECT(std::abs(report.macro_precision - macro_p / n) <= 1e-9,
               "macro precision mismatch");
        EXPECT(std::abs(report.macro_recall - macro_r / n) <= 1e-9, "macro recall mismatch");
        EXPECT(std::abs(report.macro_f1 - macro_f / n) <= 1e-9, "macro f1 mismatch");
    }
    return "";
}

// --- criteria 6 and 7 ------------------------------------------------------

fs::path benchmark_dir() { return fs::temp_directory_path() / "netact_acceptance_benchmark"; }

ExperimentConfig benchmark_config(const fs::path& dir, const fs::path& out_subdir) {
    ExperimentConfig config;
    config.name = "benchmark";
    config.captures = {dir / "capture.csv"};
    config.labels = {dir / "labels.csv"};
    config.owner_map = dir / "owners.csv";
    config.target_owners = {"appco", "cdnco"};
    config.device_ip = "10.0.0.2";
    config.timeout_seconds = 4.5;
    config.distance = distance_preset("gmail-conf1");
    for (int k = 4; k <= 24; ++k) config.cluster_range.push_back(k);
    config.forest.n_estimators = 40;
    config.seed = 20240809;
    config.test_accounts = {"acc8", "acc9"};
    config.validation_accounts = {"acc6", "acc7"};
    config.output_dir = dir / out_subdir;
    return config;
}

double g_benchmark_macro_f = 0.0;

std::string criterion6_end_to_end() {
    fs::path dir = benchmark_dir();
    fs::remove_all(dir);
    fs::create_directories(dir);

    ScenarioSpec spec = benchmark_scenario(20240809);
    size_t windows = (size_t)spec.accounts * spec.sequences_per_account * spec.templates.size();
    EXPECT(windows >= 1400 && windows <= 1600, "scenario is not ~1500 windows");

    SynthOutput out = generate(spec);
    write_file(dir / "capture.csv", out.capture_csv);
    write_file(dir / "labels.csv", out.labels_csv);
    write_file(dir / "owners.csv", out.owner_map_csv);

    ExperimentConfig config = benchmark_config(dir, "run1");
    ExperimentResult result = run_experiment(config, default_jobs());

    EXPECT(result.sweep.curve.size() == 21, "sweep did not cover k=4..24");
    EXPECT(result.report.confusion.labels.size() == 7, "expected 7 classes in the test set");
    g_benchmark_macro_f = result.report.macro_f1;
    EXPECT(result.report.macro_f1 >= 0.95,
           "macro F on held-out test accounts is " + std::to_string(result.report.macro_f1) +
               ", below 0.95");
    return "";
}

std::string criterion7_determinism() {
    fs::path dir = benchmark_dir();
    EXPECT(fs::exists(dir / "run1" / "confusion.csv"),
           "criterion 6 artifacts missing (run it first)");

    ExperimentConfig config = benchmark_config(dir, "run2");
    run_experiment(config, 1);  // different worker count on purpose

    EXPECT(read_file(dir / "run1" / "confusion.csv") == read_file(dir / "run2" / "confusion.csv"),
           "confusion.csv differs between identically seeded runs");
    EXPECT(read_file(dir / "run1" / "curve.csv") == read_file(dir / "run2" / "curve.csv"),
           "curve.csv differs between identically seeded runs");
    return "";
}

// --- criterion 8 -----------------------------------------------------------

std::string criterion8_timeout_threshold() {
    auto capture_with_gap = [](double gap) {
        std::vector<PacketRecord> packets;
        auto push = [&](double t, bool outgoing, uint8_t flags, uint32_t payload, uint32_t seq) {
            PacketRecord p;
            p.timestamp = t;
            p.src_ip = parse_ipv4(outgoing ? "10.0.0.2" : "31.13.64.1");
            p.src_port = outgoing ? 40001 : 443;
            p.dst_ip = parse_ipv4(outgoing ? "31.13.64.1" : "10.0.0.2");
            p.dst_port = outgoing ? 443 : 40001;
            p.protocol = Protocol::Tcp;
            p.size = payload + 54;
            p.flags = flags;
            p.seq = seq;
            p.payload_len = payload;
            packets.push_back(p);
        };
        push(100.000, true, flag::kSyn, 0, 0);
        push(100.002, false, flag::kSyn | flag::kAck, 0, 0);
        push(100.004, true, flag::kAck, 0, 1);
        push(100.010, true, flag::kAck | flag::kPsh, 200, 1);
        push(100.010 + gap, false, flag::kAck | flag::kPsh, 400, 1);
        return write_capture(packets, CsvSchema::default_schema());
    };

    DeviceConfig device{parse_ipv4("10.0.0.2"), 4.5};
    {
        auto packets = parse_capture(capture_with_gap(4.4), CsvSchema::default_schema());
        auto result = assemble_flows(std::move(packets), device);
        EXPECT(result.flows.size() == 1, "4.4 s gap should stay one flow");
        EXPECT(result.flows[0].packets.size() == 5, "4.4 s flow lost packets");
    }
    {
        auto packets = parse_capture(capture_with_gap(4.6), CsvSchema::default_schema());
        auto result = assemble_flows(std::move(packets), device);
        EXPECT(result.flows.size() == 2, "4.6 s gap should split into two flows");
        EXPECT(result.flows[0].packets.size() == 4 && result.flows[1].packets.size() == 1,
               "4.6 s split put packets in the wrong flows");
    }
    return "";
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    if (argc > 1) only = std::atoi(argv[1]);

    std::vector<Criterion> criteria = {
        {1, "reference flows reproduce all nine series exactly", criterion1_reference_series},
        {2, "dtw_cost equals exhaustive path enumeration on 500 random pairs",
         criterion2_dtw_oracle},
        {3, "linkage merges and leader election match naive oracles (50 matrices)",
         criterion3_linkage_and_leaders},
        {4, "forest: separable accuracy, seeded determinism, predict vs proba",
         criterion4_forest_sanity},
        {5, "metrics match an independent formula evaluation within 1e-9",
         criterion5_metrics_oracle},
        {6, "end-to-end synthetic experiment reaches macro F >= 0.95 on held-out accounts",
         criterion6_end_to_end},
        {7, "identical seeds give byte-identical confusion.csv and curve.csv",
         criterion7_determinism},
        {8, "4.4 s gaps keep a flow together, 4.6 s gaps split it",
         criterion8_timeout_threshold},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        if (only != 0 && criterion.id != only) continue;
        auto start = std::chrono::steady_clock::now();
        std::string error;
        try {
            error = criterion.body();
        } catch (const std::exception& e) {
            error = std::string("exception: ") + e.what();
        }
        double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (error.empty()) {
            std::printf("[PASS] criterion %d: %s (%.2fs)\n", criterion.id,
                        criterion.title.c_str(), seconds);
            if (criterion.id == 6)
                std::printf("       macro F on test accounts: %.4f\n", g_benchmark_macro_f);
        } else {
            std::printf("[FAIL] criterion %d: %s (%.2fs)\n       %s\n", criterion.id,
                        criterion.title.c_str(), seconds, error.c_str());
            ++failures;
        }
    }
    fs::remove_all(benchmark_dir());
    return failures;
}
