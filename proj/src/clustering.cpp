#include "baskets/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "baskets/errors.hpp"

namespace baskets {

FeatureVector feature_vector(const BasketModel& model) {
    FeatureVector y(model.final_state.probs.begin(), model.final_state.probs.end());
    y.push_back(model.orr_hat);
    return y;
}

FeatureVector orr_feature_vector(const BasketModel& model) {
    return {model.orr_hat};
}

double manhattan_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size())
        throw ConfigError("manhattan_distance: vectors of unequal length");
    double d = 0.0;
    for (std::size_t m = 0; m < a.size(); ++m) d += std::abs(a[m] - b[m]);
    return d;
}

DissimilarityMatrix DissimilarityMatrix::from_features(
    const std::vector<FeatureVector>& features) {
    const int j = static_cast<int>(features.size());
    DissimilarityMatrix d(j);
    for (int a = 0; a < j; ++a)
        for (int b = a + 1; b < j; ++b)
            d.set(a, b, manhattan_distance(features[a], features[b]));
    return d;
}

Partition Partition::single_cluster(int j) {
    Partition p;
    p.labels.assign(static_cast<std::size_t>(j), 0);
    p.cluster_count = 1;
    p.mean_silhouette = std::numeric_limits<double>::quiet_NaN();
    return p;
}

std::vector<int> cut_average_linkage(const DissimilarityMatrix& d, int u) {
    const int j = d.size();
    if (u < 1 || u > j)
        throw ConfigError("cut_average_linkage: u out of range");

    // Clusters as sorted member lists, kept ordered by smallest member so
    // the first strictly-smaller merge distance wins ties by lowest index.
    std::vector<std::vector<int>> clusters;
    clusters.reserve(static_cast<std::size_t>(j));
    for (int i = 0; i < j; ++i) clusters.push_back({i});

    auto linkage = [&](const std::vector<int>& a, const std::vector<int>& b) {
        double sum = 0.0;
        for (int x : a)
            for (int y : b) sum += d.at(x, y);
        return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
    };

    while (static_cast<int>(clusters.size()) > u) {
        int best_a = 0, best_b = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a + 1 < clusters.size(); ++a) {
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                double dist = linkage(clusters[a], clusters[b]);
                if (dist < best) {
                    best = dist;
                    best_a = static_cast<int>(a);
                    best_b = static_cast<int>(b);
                }
            }
        }
        auto merged = clusters[best_a];
        merged.insert(merged.end(), clusters[best_b].begin(), clusters[best_b].end());
        std::sort(merged.begin(), merged.end());
        clusters.erase(clusters.begin() + best_b);
        clusters[best_a] = std::move(merged);
    }

    std::vector<int> labels(static_cast<std::size_t>(j), -1);
    for (std::size_t c = 0; c < clusters.size(); ++c)
        for (int member : clusters[c]) labels[static_cast<std::size_t>(member)] = static_cast<int>(c);
    return labels;
}

SilhouetteResult silhouette(const DissimilarityMatrix& d,
                            const std::vector<int>& labels, int u) {
    const int j = d.size();
    if (static_cast<int>(labels.size()) != j)
        throw ConfigError("silhouette: label count does not match matrix size");
    if (u < 2) throw ConfigError("silhouette: requires at least two clusters");

    std::vector<int> sizes(static_cast<std::size_t>(u), 0);
    for (int label : labels) {
        if (label < 0 || label >= u) throw ConfigError("silhouette: label out of range");
        ++sizes[static_cast<std::size_t>(label)];
    }
    if (std::none_of(sizes.begin(), sizes.end(), [](int s) { return s >= 2; }))
        throw ConfigError("silhouette: undefined for all-singleton partitions");

    SilhouetteResult result;
    result.per_point.assign(static_cast<std::size_t>(j), 0.0);
    double sum = 0.0;
    for (int p = 0; p < j; ++p) {
        const int own = labels[static_cast<std::size_t>(p)];
        if (sizes[static_cast<std::size_t>(own)] < 2) continue; // singleton: s_j = 0

        double a = 0.0;
        std::vector<double> other_sums(static_cast<std::size_t>(u), 0.0);
        for (int q = 0; q < j; ++q) {
            if (q == p) continue;
            if (labels[static_cast<std::size_t>(q)] == own)
                a += d.at(p, q);
            else
                other_sums[static_cast<std::size_t>(labels[static_cast<std::size_t>(q)])] += d.at(p, q);
        }
        a /= static_cast<double>(sizes[static_cast<std::size_t>(own)] - 1);

        double b = std::numeric_limits<double>::infinity();
        for (int c = 0; c < u; ++c) {
            if (c == own || sizes[static_cast<std::size_t>(c)] == 0) continue;
            b = std::min(b, other_sums[static_cast<std::size_t>(c)] /
                                static_cast<double>(sizes[static_cast<std::size_t>(c)]));
        }

        double denom = std::max(a, b);
        double s = denom > 0.0 ? (b - a) / denom : 0.0;
        result.per_point[static_cast<std::size_t>(p)] = s;
        sum += s;
    }
    result.mean = sum / static_cast<double>(j);
    return result;
}

Partition candidate_partition(const DissimilarityMatrix& d, int u) {
    const int j = d.size();
    if (u < 2 || u > j - 1)
        throw ConfigError("candidate_partition: u must be in {2,..,J-1}");
    Partition p;
    p.labels = cut_average_linkage(d, u);
    p.cluster_count = u;
    auto sil = silhouette(d, p.labels, u);
    p.mean_silhouette = sil.mean;
    p.per_basket_silhouette = std::move(sil.per_point);
    return p;
}

Partition select_clustering(const std::vector<FeatureVector>& features) {
    const int j = static_cast<int>(features.size());
    if (j < 2) throw ConfigError("select_clustering: requires at least two baskets");

    auto d = DissimilarityMatrix::from_features(features);

    bool have_best = false;
    Partition best;
    for (int u = 2; u <= j - 1; ++u) {
        Partition cand = candidate_partition(d, u);
        if (!have_best || cand.mean_silhouette > best.mean_silhouette) {
            best = std::move(cand);
            have_best = true;
        }
    }
    // Weak or absent structure collapses to full pooling.
    if (!have_best || !(best.mean_silhouette > 0.25))
        return Partition::single_cluster(j);
    return best;
}

nlohmann::json to_json(const Partition& partition) {
    nlohmann::json j;
    j["labels"] = partition.labels;
    j["u"] = partition.cluster_count;
    if (std::isnan(partition.mean_silhouette))
        j["mean_silhouette"] = nullptr;
    else
        j["mean_silhouette"] = partition.mean_silhouette;
    nlohmann::json per = nlohmann::json::array();
    for (double s : partition.per_basket_silhouette) {
        if (std::isnan(s))
            per.push_back(nullptr);
        else
            per.push_back(s);
    }
    j["per_basket_silhouette"] = per;
    return j;
}

} // namespace baskets
