#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "baskets/bayes.hpp"
#include "baskets/clustering.hpp"
#include "baskets/scenario.hpp"

namespace baskets {

// The four analysis arms of the simulation study.
enum class MethodArm { Proposed, OrrOnly, OneCluster, NoCluster };

const char* to_string(MethodArm arm);
std::optional<MethodArm> parse_arm(const std::string& name);

inline constexpr MethodArm kAllArms[] = {MethodArm::Proposed, MethodArm::OrrOnly,
                                         MethodArm::OneCluster, MethodArm::NoCluster};

struct HarnessConfig {
    ScenarioSpec scenario;
    std::uint64_t scenario_tag = 0; // mixed into every derived stream
    int replications = 5000;
    std::uint64_t master_seed = 0;
    double threshold = 0.467;
    HierarchicalPrior prior;
    McmcSettings mcmc;
    std::vector<MethodArm> arms{std::begin(kAllArms), std::end(kAllArms)};
    int threads = 1;
};

struct ArmReplication {
    std::optional<Partition> partition; // absent for NoCluster
    std::vector<PosteriorSummary> summaries;
};

struct ReplicationResult {
    std::vector<BasketCount> baskets; // shared across arms
    std::map<MethodArm, ArmReplication> arms;
};

// True iff the labels induce the same set partition as the truth, up to
// relabeling of cluster ids.
bool correct_structure(const std::vector<int>& labels, const std::vector<int>& truth);

// Simulates all baskets once from streams derived per (scenario,
// replication, basket, patient), then runs every requested arm on the
// shared dataset.
ReplicationResult run_replication(const HarnessConfig& config, int replication);

struct ArmCharacteristics {
    // Index 0 holds the single-cluster outcome (the weak-structure
    // fallback); index u-1 the u-cluster outcome. Percent of replications.
    std::vector<double> cluster_count_percent;
    double correct_structure_percent = 0.0;
    bool clustering_applicable = false;

    std::vector<double> rejection_percent;  // per basket
    std::vector<double> mean_posterior_mean;
    std::vector<double> mean_ci_low;
    std::vector<double> mean_ci_high;
};

struct OperatingCharacteristics {
    int replications = 0;
    std::map<MethodArm, ArmCharacteristics> arms;
};

OperatingCharacteristics aggregate(const std::vector<ReplicationResult>& results,
                                   const std::vector<int>& true_partition);

// Runs all replications (optionally in parallel) and aggregates. The
// result is independent of thread count and execution order.
OperatingCharacteristics run_simulation(const HarnessConfig& config);

// Report writers (Table 1 / Tables 2-4 / Figures 1-3 layouts).
std::string clustering_results_csv(const OperatingCharacteristics& oc);
std::string rejection_probs_csv(const OperatingCharacteristics& oc);
std::string posterior_summaries_csv(const OperatingCharacteristics& oc,
                                    const std::string& scenario_name);

} // namespace baskets
