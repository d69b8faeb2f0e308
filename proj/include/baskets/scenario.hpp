#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "baskets/markov.hpp"
#include "baskets/rng.hpp"

namespace baskets {

// Generative truth for one basket.
struct BasketTruth {
    StateDistribution pi0;
    TransitionMatrix transition;
};

// Full simulation scenario: per-basket truths, sample sizes, the shared
// distribution of assessment counts over t = 1..max, and the ground-truth
// cluster labels.
struct ScenarioSpec {
    std::vector<BasketTruth> baskets;
    std::vector<int> n_per_basket;
    std::vector<double> length_probs; // index 0 is t = 1
    std::vector<int> true_partition;

    int basket_count() const { return static_cast<int>(baskets.size()); }
    void validate() const;
};

// The three built-in five-basket scenarios (same assessment-count
// distribution over t = 1..10 for all of them). Scenario 1: one shared
// matrix; Scenario 2: clusters {1,2,3} and {4,5}; Scenario 3: {1,2},
// {3,4}, {5}.
ScenarioSpec builtin_scenario(int id, int n_per_basket);

ScenarioSpec scenario_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec load_scenario_file(const std::string& path);

// One simulated basket: each patient draws an assessment count from
// length_probs, a first state from pi0, and Markov transitions after that.
// Patient i's draws come from the stream derived from (master, scenario,
// replication, basket, i), so any trajectory is reproducible in isolation.
BasketData simulate_basket(const BasketTruth& truth,
                           const std::vector<double>& length_probs,
                           int n, const std::string& basket_id,
                           std::uint64_t master_seed, std::uint64_t scenario_tag,
                           std::uint64_t replication, std::uint64_t basket_index);

struct MonteCarloEstimate {
    double value = 0.0;
    double std_error = 0.0;
};

// Monte Carlo probability of ever reaching CR or PR under the generative
// process, including the random assessment count.
MonteCarloEstimate true_orr(const BasketTruth& truth,
                            const std::vector<double>& length_probs,
                            long reps, RngStream& rng);

// Closed-form counterpart of true_orr via the chain restricted to the
// non-response states; used as an independent check on the Monte Carlo
// estimate.
double exact_orr(const BasketTruth& truth, const std::vector<double>& length_probs);

} // namespace baskets
