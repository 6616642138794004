#pragma once

// Independent test oracles. These deliberately mirror the definitions rather
// than the library's algorithms, so they must stay free of any code from
// src/ beyond plain data types.

#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <vector>

#include "netact/cluster.hpp"
#include "netact/series.hpp"

namespace netact::testing {

/// Minimal total cost over every warping path satisfying the boundary,
/// monotonicity and step-size conditions, found by exhaustive enumeration.
/// Tractable only for tiny inputs; |x|*|y| must be <= 36.
inline int64_t dtw_enumerate_oracle(const ByteSeries& x, const ByteSeries& y) {
    if (x.empty() || y.empty()) throw std::invalid_argument("oracle needs non-empty series");
    if (x.size() * y.size() > 36) throw std::invalid_argument("oracle size bound exceeded");

    const int n = static_cast<int>(x.size());
    const int m = static_cast<int>(y.size());
    int64_t best = INT64_MAX;

    // Depth-first over the three admissible steps from each cell.
    auto walk = [&](auto&& self, int i, int j, int64_t cost) -> void {
        cost += std::abs(static_cast<int64_t>(x[static_cast<size_t>(i)]) -
                         y[static_cast<size_t>(j)]);
        if (i == n - 1 && j == m - 1) {
            best = std::min(best, cost);
            return;
        }
        if (j + 1 < m) self(self, i, j + 1, cost);
        if (i + 1 < n) self(self, i + 1, j, cost);
        if (i + 1 < n && j + 1 < m) self(self, i + 1, j + 1, cost);
    };
    walk(walk, 0, 0, 0);
    return best;
}

struct NaiveMerge {
    int left_rep = 0;
    int right_rep = 0;
    double distance = 0.0;
};

/// Greedy average-linkage agglomeration that recomputes every candidate
/// linkage from the original matrix by the definitional double sum at each
/// step. Ties break toward the lexicographically smallest representative pair.
inline std::vector<NaiveMerge> naive_average_linkage(const DistanceMatrix& d) {
    std::vector<std::vector<int>> clusters;
    for (size_t i = 0; i < d.size(); ++i) clusters.push_back({static_cast<int>(i)});

    std::vector<NaiveMerge> merges;
    while (clusters.size() > 1) {
        size_t best_a = 0, best_b = 1;
        double best_dist = 0.0;
        bool first = true;
        for (size_t a = 0; a < clusters.size(); ++a) {
            for (size_t b = a + 1; b < clusters.size(); ++b) {
                double sum = 0.0;
                for (int i : clusters[a])
                    for (int j : clusters[b])
                        sum += d(static_cast<size_t>(i), static_cast<size_t>(j));
                double dist =
                    sum / (static_cast<double>(clusters[a].size()) * clusters[b].size());
                int rep_a = clusters[a].front();
                int rep_b = clusters[b].front();
                int lo = std::min(rep_a, rep_b), hi = std::max(rep_a, rep_b);
                int cur_lo = std::min(clusters[best_a].front(), clusters[best_b].front());
                int cur_hi = std::max(clusters[best_a].front(), clusters[best_b].front());
                bool better = first || dist < best_dist ||
                              (dist == best_dist &&
                               (lo < cur_lo || (lo == cur_lo && hi < cur_hi)));
                if (better) {
                    best_a = a;
                    best_b = b;
                    best_dist = dist;
                    first = false;
                }
            }
        }
        int rep_a = clusters[best_a].front();
        int rep_b = clusters[best_b].front();
        merges.push_back(
            NaiveMerge{std::min(rep_a, rep_b), std::max(rep_a, rep_b), best_dist});
        auto merged = clusters[best_a];
        merged.insert(merged.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(merged.begin(), merged.end());
        clusters.erase(clusters.begin() + static_cast<ptrdiff_t>(best_b));
        clusters[best_a] = std::move(merged);
    }
    return merges;
}

}  // namespace netact::testing
