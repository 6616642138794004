#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace netact {

/// Rows = true label, columns = predicted label, integer counts.
struct ConfusionMatrix {
    std::vector<std::string> labels;
    std::vector<std::vector<int64_t>> counts;

    explicit ConfusionMatrix(std::vector<std::string> label_order = {});

    void add(const std::string& truth, const std::string& predicted, int64_t n = 1);
    int64_t total() const;

    /// CSV with a header row of predicted labels and one row per true label.
    std::string to_csv() const;
    static ConfusionMatrix from_csv(const std::string& text);

private:
    size_t index_of(const std::string& label);  // appends unseen labels
};

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    ConfusionMatrix confusion{std::vector<std::string>{}};
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double accuracy = 0.0;
};

/// Precision/recall/F per class plus unweighted macro averages. Classes with
/// no predicted (or no true) examples take precision (recall) 0.
EvalReport metrics(const ConfusionMatrix& confusion);

}  // namespace netact
