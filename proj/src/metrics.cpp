#include "netact/metrics.hpp"

#include <sstream>

#include "netact/errors.hpp"

namespace netact {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> label_order)
    : labels(std::move(label_order)) {
    counts.assign(labels.size(), std::vector<int64_t>(labels.size(), 0));
}

size_t ConfusionMatrix::index_of(const std::string& label) {
    for (size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] == label) return i;
    }
    labels.push_back(label);
    for (auto& row : counts) row.push_back(0);
    counts.emplace_back(labels.size(), 0);
    return labels.size() - 1;
}

void ConfusionMatrix::add(const std::string& truth, const std::string& predicted, int64_t n) {
    size_t r = index_of(truth);
    size_t c = index_of(predicted);
    counts[r][c] += n;
}

int64_t ConfusionMatrix::total() const {
    int64_t sum = 0;
    for (const auto& row : counts)
        for (int64_t v : row) sum += v;
    return sum;
}

std::string ConfusionMatrix::to_csv() const {
    std::string out = "label";
    for (const auto& label : labels) out += ',' + label;
    out += '\n';
    for (size_t r = 0; r < labels.size(); ++r) {
        out += labels[r];
        for (int64_t v : counts[r]) out += ',' + std::to_string(v);
        out += '\n';
    }
    return out;
}

ConfusionMatrix ConfusionMatrix::from_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty confusion matrix");
    std::vector<std::string> labels;
    {
        std::istringstream header(line);
        std::string cell;
        bool first = true;
        while (std::getline(header, cell, ',')) {
            if (first) {
                first = false;
                continue;
            }
            labels.push_back(cell);
        }
    }
    ConfusionMatrix m(labels);
    size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (row >= labels.size()) throw ParseError("confusion matrix has too many rows");
        std::istringstream cells(line);
        std::string cell;
        std::getline(cells, cell, ',');
        if (cell != labels[row]) throw ParseError("confusion matrix row order mismatch");
        for (size_t c = 0; c < labels.size(); ++c) {
            if (!std::getline(cells, cell, ','))
                throw ParseError("confusion matrix row too short");
            m.counts[row][c] = std::stoll(cell);
        }
        ++row;
    }
    if (row != labels.size()) throw ParseError("confusion matrix has too few rows");
    return m;
}

EvalReport metrics(const ConfusionMatrix& confusion) {
    const size_t n = confusion.labels.size();
    EvalReport report;
    report.confusion = confusion;
    report.per_class.resize(n);

    int64_t diagonal = 0;
    for (size_t c = 0; c < n; ++c) {
        int64_t tp = confusion.counts[c][c];
        int64_t row_sum = 0;   // tp + fn
        int64_t col_sum = 0;   // tp + fp
        for (size_t j = 0; j < n; ++j) {
            row_sum += confusion.counts[c][j];
            col_sum += confusion.counts[j][c];
        }
        diagonal += tp;

        ClassMetrics& m = report.per_class[c];
        m.precision = col_sum == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(col_sum);
        m.recall = row_sum == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(row_sum);
        m.f1 = (m.precision + m.recall) == 0.0
                   ? 0.0
                   : 2.0 * m.precision * m.recall / (m.precision + m.recall);
        report.macro_precision += m.precision;
        report.macro_recall += m.recall;
        report.macro_f1 += m.f1;
    }
    if (n > 0) {
        report.macro_precision /= static_cast<double>(n);
        report.macro_recall /= static_cast<double>(n);
        report.macro_f1 /= static_cast<double>(n);
    }
    int64_t total = confusion.total();
    report.accuracy = total == 0 ? 0.0 : static_cast<double>(diagonal) / static_cast<double>(total);
    return report;
}

}  // namespace netact
