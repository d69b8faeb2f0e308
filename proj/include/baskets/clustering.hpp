#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "baskets/markov.hpp"

namespace baskets {

// Clustering feature: (final-state distribution, ORR) for the full
// trajectory-based method, or the 1-component ORR vector for the
// ORR-only comparator. All components are probabilities, so no scaling
// is applied before distance computation.
using FeatureVector = std::vector<double>;

FeatureVector feature_vector(const BasketModel& model);
FeatureVector orr_feature_vector(const BasketModel& model);

double manhattan_distance(std::span<const double> a, std::span<const double> b);

// Symmetric nonnegative J x J matrix with zero diagonal.
class DissimilarityMatrix {
public:
    explicit DissimilarityMatrix(int n) : n_(n), d_(static_cast<std::size_t>(n) * n, 0.0) {}

    static DissimilarityMatrix from_features(const std::vector<FeatureVector>& features);

    int size() const { return n_; }
    double at(int i, int j) const { return d_[static_cast<std::size_t>(i) * n_ + j]; }
    void set(int i, int j, double v) {
        d_[static_cast<std::size_t>(i) * n_ + j] = v;
        d_[static_cast<std::size_t>(j) * n_ + i] = v;
    }

private:
    int n_;
    std::vector<double> d_;
};

// Cluster assignment of J baskets. cluster ids are 0..u-1, each appearing
// at least once; ids are ordered by the smallest member index of each
// cluster. mean_silhouette is NaN when undefined (u = 1).
struct Partition {
    std::vector<int> labels;
    int cluster_count = 1;
    double mean_silhouette = 0.0;
    std::vector<double> per_basket_silhouette; // 0 for singleton members

    static Partition single_cluster(int j);
};

// Agglomerative hierarchical clustering with average linkage on d, cut at
// u clusters. Ties in merge distance are broken by merging the pair with
// the lowest basket indices, so the result is fully deterministic.
std::vector<int> cut_average_linkage(const DissimilarityMatrix& d, int u);

struct SilhouetteResult {
    std::vector<double> per_point; // 0 for members of singleton clusters
    double mean = 0.0;             // (1/J) * sum over all baskets
};

// Silhouette values s_j = (b_j - a_j) / max(a_j, b_j) with the conventions
// s_j = 0 at max(a_j, b_j) = 0 and s_j = 0 for members of singleton
// clusters (which still count as neighbor clusters for b_j). The mean
// divides by J, so singleton-heavy partitions are penalized. Requires at
// least one cluster of size >= 2.
SilhouetteResult silhouette(const DissimilarityMatrix& d,
                            const std::vector<int>& labels, int u);

// Average-linkage cut at u plus its silhouette score. 2 <= u <= J-1.
Partition candidate_partition(const DissimilarityMatrix& d, int u);

// Full selection rule: maximize mean silhouette over u in {2,..,J-1}
// (ties to smaller u); fall back to the single-cluster partition when the
// best mean silhouette is <= 0.25 or when no candidate exists (J = 2).
Partition select_clustering(const std::vector<FeatureVector>& features);

nlohmann::json to_json(const Partition& partition);

} // namespace baskets
