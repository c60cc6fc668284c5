// Independent reference implementations used to check the library. These are
// deliberately written as plain definitional code (no shared logic with the
// implementations under test).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "tmc/clustering.hpp"
#include "tmc/trajectory.hpp"

namespace oracle {

// Definitional directed Hausdorff: per-pair Euclidean distance sqrt(dx^2 +
// dy^2), then min, then max.
inline double directed_hausdorff(const tmc::Trajectory& p, const tmc::Trajectory& q) {
    double worst = 0.0;
    for (const auto& a : p.points) {
        double nearest = std::numeric_limits<double>::infinity();
        for (const auto& b : q.points) {
            const double dx = a.x - b.x;
            const double dy = a.y - b.y;
            nearest = std::min(nearest, std::sqrt(dx * dx + dy * dy));
        }
        worst = std::max(worst, nearest);
    }
    return worst;
}

// Percentile with linear interpolation, written from the rank formula. The
// lerp is pinned to lo + w * (hi - lo); that exact expression is part of the
// contract, since the algebraically equal two-weight form differs in the
// last ulp.
inline double percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    const double rank = p * static_cast<double>(n - 1);
    const auto lower = static_cast<std::size_t>(std::floor(rank));
    const auto upper = static_cast<std::size_t>(std::ceil(rank));
    if (lower == upper) return values[lower];
    const double w = rank - static_cast<double>(lower);
    return values[lower] + w * (values[upper] - values[lower]);
}

struct NaiveClustering {
    std::vector<int> labels;            // normalized: cluster ids by min member
    std::vector<double> merge_distances;
};

// Definitional agglomeration: keeps explicit member lists and recomputes
// every cluster-pair linkage from the base matrix at every step. Tie-break:
// smallest (min member of first, min member of second) pair.
inline NaiveClustering naive_agglomerate(const tmc::DissimilarityMatrix& m, int k,
                                         tmc::Linkage linkage) {
    const std::size_t n = m.size();
    std::vector<std::vector<std::size_t>> clusters(n);
    for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};

    NaiveClustering out;
    const auto link = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
        if (linkage == tmc::Linkage::Single) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i : a)
                for (std::size_t j : b) best = std::min(best, m(i, j));
            return best;
        }
        double sum = 0.0;
        for (std::size_t i : a)
            for (std::size_t j : b) sum += m(i, j);
        return sum / static_cast<double>(a.size() * b.size());
    };
    const auto rep = [](const std::vector<std::size_t>& c) {
        return *std::min_element(c.begin(), c.end());
    };

    while (clusters.size() > static_cast<std::size_t>(k)) {
        std::size_t best_a = 0, best_b = 1;
        double best = std::numeric_limits<double>::infinity();
        std::pair<std::size_t, std::size_t> best_key{0, 0};
        bool first = true;
        for (std::size_t a = 0; a < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                const double d = link(clusters[a], clusters[b]);
                const std::size_t ra = rep(clusters[a]);
                const std::size_t rb = rep(clusters[b]);
                const std::pair<std::size_t, std::size_t> key{std::min(ra, rb), std::max(ra, rb)};
                if (first || d < best || (d == best && key < best_key)) {
                    best = d;
                    best_a = a;
                    best_b = b;
                    best_key = key;
                    first = false;
                }
            }
        }
        out.merge_distances.push_back(best);
        clusters[best_a].insert(clusters[best_a].end(), clusters[best_b].begin(),
                                clusters[best_b].end());
        clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_b));
    }

    std::sort(clusters.begin(), clusters.end(),
              [&](const auto& a, const auto& b) { return rep(a) < rep(b); });
    out.labels.assign(n, -1);
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (std::size_t i : clusters[c]) out.labels[i] = static_cast<int>(c);
    }
    return out;
}

struct ScalarMetrics {
    double accuracy = 0.0;
    double balanced_accuracy = 0.0;
    double macro_f1 = 0.0;
};

// Metrics re-derived from raw (truth, prediction) pairs without building a
// matrix. Unknown predictions are errors when count_unknown_as_error, else
// the vehicle is skipped entirely.
inline ScalarMetrics metrics_from_pairs(
    const std::vector<std::pair<tmc::MovementLabel, tmc::MovementLabel>>& pairs,
    bool count_unknown_as_error) {
    std::vector<std::pair<tmc::MovementLabel, tmc::MovementLabel>> kept;
    std::map<tmc::MovementLabel, bool> class_set;
    for (const auto& [actual, predicted] : pairs) {
        if (predicted.is_unknown() && !count_unknown_as_error) continue;
        kept.push_back({actual, predicted});
        class_set[actual] = true;
        if (!predicted.is_unknown()) class_set[predicted] = true;
    }

    ScalarMetrics out;
    long long correct = 0;
    for (const auto& [actual, predicted] : kept) correct += (actual == predicted) ? 1 : 0;
    out.accuracy = static_cast<double>(correct) / static_cast<double>(kept.size());

    double recall_sum = 0.0;
    std::size_t recall_classes = 0;
    double f1_sum = 0.0;
    for (const auto& [cls, unused] : class_set) {
        (void)unused;
        long long tp = 0, actual_count = 0, predicted_count = 0;
        for (const auto& [actual, predicted] : kept) {
            if (actual == cls) ++actual_count;
            if (predicted == cls) ++predicted_count;
            if (actual == cls && predicted == cls) ++tp;
        }
        if (actual_count > 0) {
            recall_sum += static_cast<double>(tp) / static_cast<double>(actual_count);
            ++recall_classes;
        }
        if (actual_count > 0 && predicted_count > 0) {
            const double p = static_cast<double>(tp) / static_cast<double>(predicted_count);
            const double r = static_cast<double>(tp) / static_cast<double>(actual_count);
            if (p + r > 0.0) f1_sum += 2.0 * p * r / (p + r);
        }
    }
    out.balanced_accuracy = recall_sum / static_cast<double>(recall_classes);
    out.macro_f1 = f1_sum / static_cast<double>(class_set.size());
    return out;
}

}  // namespace oracle
