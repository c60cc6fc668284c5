#include "tmc/clustering.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tmc {

void DissimilarityMatrix::validate() const {
    for (std::size_t i = 0; i < n_; ++i) {
        if ((*this)(i, i) != 0.0) {
            throw std::invalid_argument("DissimilarityMatrix: nonzero diagonal at " +
                                        std::to_string(i));
        }
        for (std::size_t j = i + 1; j < n_; ++j) {
            // Negative entries are tolerated: a composite similarity with a
            // strongly negative proximity term can dip below zero, and merge
            // order only depends on the value ordering.
            const double v = (*this)(i, j);
            if (!std::isfinite(v)) {
                throw std::invalid_argument("DissimilarityMatrix: non-finite value at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
            if (v != (*this)(j, i)) {
                throw std::invalid_argument("DissimilarityMatrix: not symmetric at (" +
                                            std::to_string(i) + "," + std::to_string(j) + ")");
            }
        }
    }
}

ClusterAssignment agglomerate(const DissimilarityMatrix& m, int k, Linkage linkage) {
    const std::size_t n = m.size();
    if (n == 0) throw std::invalid_argument("agglomerate: empty matrix");
    if (k < 1 || static_cast<std::size_t>(k) > n) {
        throw std::invalid_argument("agglomerate: k=" + std::to_string(k) +
                                    " out of range for n=" + std::to_string(n));
    }
    m.validate();

    // Cluster slot i holds the cluster whose smallest member index is i, so
    // scanning slot pairs in ascending (a, b) order applies the tie-break.
    std::vector<std::vector<double>> d(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = m(i, j);

    std::vector<bool> active(n, true);
    std::vector<std::size_t> size(n, 1);
    std::vector<std::vector<int>> members(n);
    for (std::size_t i = 0; i < n; ++i) members[i] = {static_cast<int>(i)};

    for (std::size_t remaining = n; remaining > static_cast<std::size_t>(k); --remaining) {
        std::size_t best_a = n, best_b = n;
        double best = 0.0;
        for (std::size_t a = 0; a < n; ++a) {
            if (!active[a]) continue;
            for (std::size_t b = a + 1; b < n; ++b) {
                if (!active[b]) continue;
                if (best_a == n || d[a][b] < best) {
                    best = d[a][b];
                    best_a = a;
                    best_b = b;
                }
            }
        }

        // Lance-Williams update into the lower slot.
        for (std::size_t o = 0; o < n; ++o) {
            if (!active[o] || o == best_a || o == best_b) continue;
            double updated;
            if (linkage == Linkage::Single) {
                updated = std::min(d[best_a][o], d[best_b][o]);
            } else {
                updated = (static_cast<double>(size[best_a]) * d[best_a][o] +
                           static_cast<double>(size[best_b]) * d[best_b][o]) /
                          static_cast<double>(size[best_a] + size[best_b]);
            }
            d[best_a][o] = updated;
            d[o][best_a] = updated;
        }
        size[best_a] += size[best_b];
        members[best_a].insert(members[best_a].end(), members[best_b].begin(),
                               members[best_b].end());
        active[best_b] = false;
    }

    ClusterAssignment out;
    out.labels.assign(n, -1);
    out.k = k;
    int next_label = 0;
    for (std::size_t slot = 0; slot < n; ++slot) {
        if (!active[slot]) continue;
        for (int item : members[slot]) out.labels[static_cast<std::size_t>(item)] = next_label;
        ++next_label;
    }
    return out;
}

std::vector<std::size_t> cluster_sizes(const ClusterAssignment& assignment) {
    std::vector<std::size_t> sizes(static_cast<std::size_t>(assignment.k), 0);
    for (int label : assignment.labels) {
        if (label < 0 || label >= assignment.k) {
            throw std::invalid_argument("cluster_sizes: label out of range");
        }
        ++sizes[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < sizes.size(); ++c) {
        if (sizes[c] == 0) {
            throw std::invalid_argument("cluster_sizes: empty cluster " + std::to_string(c));
        }
    }
    return sizes;
}

}  // namespace tmc
