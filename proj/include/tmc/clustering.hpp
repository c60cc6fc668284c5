#pragma once

#include <cstddef>
#include <vector>

namespace tmc {

/// Symmetric pairwise dissimilarity matrix with zero diagonal. Stored dense;
/// set() writes both triangles.
class DissimilarityMatrix {
  public:
    DissimilarityMatrix() = default;
    explicit DissimilarityMatrix(std::size_t n) : n_(n), values_(n * n, 0.0) {}

    std::size_t size() const { return n_; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * n_ + j]; }

    void set(std::size_t i, std::size_t j, double value) {
        values_[i * n_ + j] = value;
        values_[j * n_ + i] = value;
    }

    /// Throws if the matrix is non-symmetric, non-finite, negative or has a
    /// nonzero diagonal.
    void validate() const;

    bool operator==(const DissimilarityMatrix&) const = default;

  private:
    std::size_t n_ = 0;
    std::vector<double> values_;
};

enum class Linkage { Single, Average };

/// Flat clustering: labels[i] in [0, k). Clusters are numbered by the
/// smallest item index they contain, in ascending order.
struct ClusterAssignment {
    std::vector<int> labels;
    int k = 0;
};

/// Agglomerative hierarchical clustering over a precomputed matrix. Starts
/// from singletons and merges the pair of clusters with the smallest linkage
/// distance until k clusters remain. Single linkage is the minimum pairwise
/// dissimilarity across the two clusters, Average the unweighted mean over
/// all cross pairs. Ties pick the pair whose (smaller, larger) minimum member
/// indices compare lexicographically smallest, so runs are deterministic.
ClusterAssignment agglomerate(const DissimilarityMatrix& m, int k, Linkage linkage);

/// Item count per cluster index; sums to the number of items.
std::vector<std::size_t> cluster_sizes(const ClusterAssignment& assignment);

}  // namespace tmc
