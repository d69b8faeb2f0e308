#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>

#include <json.hpp>

#include "baskets/response.hpp"

namespace baskets {

using StateVector = std::array<double, kNumStates>;
using CountMatrix = std::array<std::array<std::int64_t, kNumStates>, kNumStates>;

// Probability vector over the four response states (initial distribution,
// weighted final-state distribution). Entries sum to 1 within 1e-12.
struct StateDistribution {
    StateVector probs{};

    double operator[](ResponseState s) const { return probs[static_cast<int>(s)]; }
    double sum() const;
};

// Row-stochastic 4x4 one-step transition matrix; rows indexed by source
// state, columns by destination state.
struct TransitionMatrix {
    std::array<StateVector, kNumStates> rows{};

    static TransitionMatrix uniform();
    static TransitionMatrix identity();

    // Row-vector product v -> vP, renormalized to suppress rounding drift.
    StateVector apply(const StateVector& v) const;

    // k-fold product by repeated multiplication (k >= 0; k = 0 is identity).
    TransitionMatrix power(int k) const;
};

// Observation-frequency weights over the observed assessment counts; keys
// are exactly the distinct observed t values and values sum to 1.
struct ScheduleWeights {
    std::map<int, double> weights;
};

// Per-basket Markov summary: everything needed to rebuild the weighted
// final-state distribution and audit the transition estimate.
struct BasketModel {
    std::string basket_id;
    StateDistribution pi0_hat;
    TransitionMatrix transition;
    ScheduleWeights weights;
    StateDistribution final_state;
    double orr_hat = 0.0;
    int n = 0;
    CountMatrix counts{};
};

// Sum of adjacent-pair transition counts across patients; length-1
// trajectories contribute nothing.
CountMatrix count_transitions(const BasketData& basket);

// Row-normalizes the counts; a row with no observed outgoing transitions
// becomes the uniform distribution (1/4 each).
TransitionMatrix estimate_transition_matrix(const CountMatrix& counts);

// Fraction of patients whose baseline (first) assessment is each state.
StateDistribution estimate_initial_distribution(const BasketData& basket);

// Fraction of patients observed at each assessment count.
ScheduleWeights estimate_schedule_weights(const BasketData& basket);

// Mixture over observed assessment counts of pi0 propagated t-1 steps:
// sum_t w_t * pi0 * P^(t-1).
StateDistribution weighted_final_state(const StateDistribution& pi0,
                                       const TransitionMatrix& p,
                                       const ScheduleWeights& w);

BasketModel fit_basket(const BasketData& basket);

nlohmann::json to_json(const BasketModel& model);

} // namespace baskets
