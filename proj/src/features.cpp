#include "netact/features.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <map>

#include "netact/errors.hpp"

namespace netact {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    size_t pos = 0;
    for (;;) {
        size_t comma = line.find(',', pos);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(pos));
            break;
        }
        fields.push_back(line.substr(pos, comma - pos));
        pos = comma + 1;
    }
    return fields;
}

std::vector<std::string> lines_of(std::string_view text) {
    std::vector<std::string> lines;
    size_t pos = 0;
    while (pos <= text.size()) {
        size_t eol = text.find('\n', pos);
        std::string line(text.substr(pos, eol == std::string_view::npos ? eol : eol - pos));
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(std::move(line));
    }
    return lines;
}

void check_name(const std::string& value, const char* what) {
    if (value.empty()) throw ParseError(std::string("empty ") + what);
    if (value.find(',') != std::string::npos)
        throw ParseError(std::string(what) + " '" + value + "' must not contain commas");
}

}  // namespace

std::vector<LabelEntry> parse_labels(std::string_view text) {
    std::vector<LabelEntry> entries;
    size_t line_no = 0;
    for (const auto& line : lines_of(text)) {
        ++line_no;
        if (line[0] == '#') continue;
        auto fields = split_csv_line(line);
        if (fields.size() != 4)
            throw ParseError(line_no, "label line needs 4 fields, got " +
                                          std::to_string(fields.size()));
        LabelEntry entry;
        auto [ptr, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(),
                                         entry.flow_start);
        if (ec != std::errc() || ptr != fields[0].data() + fields[0].size())
            throw ParseError(line_no, "bad flow_start '" + fields[0] + "'");
        entry.key = parse_flow_key(fields[1]);
        check_name(fields[2], "action label");
        check_name(fields[3], "account id");
        entry.label = fields[2];
        entry.account = fields[3];
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::string write_labels(std::span<const LabelEntry> entries) {
    std::string out;
    char buf[64];
    for (const auto& e : entries) {
        std::snprintf(buf, sizeof(buf), "%.6f", e.flow_start);
        out += buf;
        out += ',';
        out += format_flow_key(e.key);
        out += ',';
        out += e.label;
        out += ',';
        out += e.account;
        out += '\n';
    }
    return out;
}

size_t apply_labels(std::vector<Flow>& flows, std::span<const LabelEntry> entries) {
    // Index flows by key; scan each key's flows for the span containing the entry.
    std::map<FlowKey, std::vector<Flow*>> by_key;
    for (auto& flow : flows) by_key[flow.key].push_back(&flow);

    size_t unmatched = 0;
    for (const auto& entry : entries) {
        auto it = by_key.find(entry.key);
        bool matched = false;
        if (it != by_key.end()) {
            for (Flow* flow : it->second) {
                if (entry.flow_start >= flow->start_time && entry.flow_start <= flow->end_time) {
                    flow->label = entry.label;
                    flow->account = entry.account;
                    matched = true;
                    break;
                }
            }
        }
        if (!matched) ++unmatched;
    }
    return unmatched;
}

std::vector<ActionWindow> group_windows(std::span<const Flow> flows, double gap_seconds) {
    std::vector<const Flow*> labeled;
    for (const auto& flow : flows) {
        if (flow.label && flow.account) labeled.push_back(&flow);
    }
    std::stable_sort(labeled.begin(), labeled.end(), [](const Flow* a, const Flow* b) {
        return a->start_time < b->start_time;
    });

    std::vector<ActionWindow> windows;
    for (const Flow* flow : labeled) {
        bool fresh = windows.empty() || windows.back().label != *flow->label ||
                     windows.back().account != *flow->account ||
                     flow->start_time - windows.back().flows.back().start_time > gap_seconds;
        if (fresh) {
            ActionWindow window;
            window.label = *flow->label;
            window.account = *flow->account;
            window.start = flow->start_time;
            window.end = flow->end_time;
            windows.push_back(std::move(window));
        }
        auto& window = windows.back();
        window.flows.push_back(*flow);
        window.start = std::min(window.start, flow->start_time);
        window.end = std::max(window.end, flow->end_time);
    }
    return windows;
}

ActionInstance build_instance(const ActionWindow& window, const ClusterModel& model) {
    ActionInstance instance;
    instance.label = window.label;
    instance.account = window.account;
    instance.features.assign(static_cast<size_t>(model.k), 0);
    for (const auto& flow : window.flows) {
        ++instance.features[static_cast<size_t>(model.assign(flow))];
    }
    return instance;
}

std::vector<ActionInstance> build_dataset(std::span<const ActionWindow> windows,
                                          const ClusterModel& model) {
    std::vector<ActionInstance> dataset;
    dataset.reserve(windows.size());
    for (const auto& window : windows) dataset.push_back(build_instance(window, model));
    return dataset;
}

std::string write_dataset(std::span<const ActionInstance> instances, int k) {
    std::string out = "label,account";
    for (int i = 0; i < k; ++i) out += ",f" + std::to_string(i);
    out += '\n';
    for (const auto& instance : instances) {
        if (instance.features.size() != static_cast<size_t>(k))
            throw EvalError("instance feature count does not match k");
        out += instance.label;
        out += ',';
        out += instance.account;
        for (int f : instance.features) out += ',' + std::to_string(f);
        out += '\n';
    }
    return out;
}

std::vector<ActionInstance> parse_dataset(std::string_view text) {
    auto lines = lines_of(text);
    if (lines.empty()) throw ParseError("empty dataset");
    auto header = split_csv_line(lines[0]);
    if (header.size() < 2 || header[0] != "label" || header[1] != "account")
        throw ParseError(1, "bad dataset header");
    const size_t k = header.size() - 2;

    std::vector<ActionInstance> instances;
    for (size_t i = 1; i < lines.size(); ++i) {
        auto fields = split_csv_line(lines[i]);
        if (fields.size() != header.size())
            throw ParseError(i + 1, "expected " + std::to_string(header.size()) + " fields");
        ActionInstance instance;
        instance.label = fields[0];
        instance.account = fields[1];
        instance.features.reserve(k);
        for (size_t f = 2; f < fields.size(); ++f) {
            int value = 0;
            auto [ptr, ec] =
                std::from_chars(fields[f].data(), fields[f].data() + fields[f].size(), value);
            if (ec != std::errc() || ptr != fields[f].data() + fields[f].size() || value < 0)
                throw ParseError(i + 1, "bad feature value '" + fields[f] + "'");
            instance.features.push_back(value);
        }
        instances.push_back(std::move(instance));
    }
    return instances;
}

}  // namespace netact
