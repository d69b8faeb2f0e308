#include "baskets/markov.hpp"

#include <numeric>

#include "baskets/errors.hpp"

namespace baskets {
namespace {

StateVector normalized(const StateVector& v) {
    double s = std::accumulate(v.begin(), v.end(), 0.0);
    StateVector out = v;
    if (s > 0.0)
        for (double& x : out) x /= s;
    return out;
}

} // namespace

double StateDistribution::sum() const {
    return std::accumulate(probs.begin(), probs.end(), 0.0);
}

TransitionMatrix TransitionMatrix::uniform() {
    TransitionMatrix m;
    for (auto& row : m.rows) row.fill(1.0 / kNumStates);
    return m;
}

TransitionMatrix TransitionMatrix::identity() {
    TransitionMatrix m;
    for (int r = 0; r < kNumStates; ++r) m.rows[r][r] = 1.0;
    return m;
}

StateVector TransitionMatrix::apply(const StateVector& v) const {
    StateVector out{};
    for (int r = 0; r < kNumStates; ++r)
        for (int s = 0; s < kNumStates; ++s) out[s] += v[r] * rows[r][s];
    double in_mass = std::accumulate(v.begin(), v.end(), 0.0);
    double out_mass = std::accumulate(out.begin(), out.end(), 0.0);
    if (out_mass > 0.0)
        for (double& x : out) x *= in_mass / out_mass;
    return out;
}

TransitionMatrix TransitionMatrix::power(int k) const {
    TransitionMatrix result = identity();
    for (int step = 0; step < k; ++step) {
        TransitionMatrix next;
        for (int r = 0; r < kNumStates; ++r) {
            for (int s = 0; s < kNumStates; ++s) {
                double acc = 0.0;
                for (int m = 0; m < kNumStates; ++m)
                    acc += result.rows[r][m] * rows[m][s];
                next.rows[r][s] = acc;
            }
            next.rows[r] = normalized(next.rows[r]);
        }
        result = next;
    }
    return result;
}

CountMatrix count_transitions(const BasketData& basket) {
    CountMatrix counts{};
    for (const auto& patient : basket.patients) {
        for (std::size_t l = 0; l + 1 < patient.states.size(); ++l) {
            int r = static_cast<int>(patient.states[l]);
            int s = static_cast<int>(patient.states[l + 1]);
            ++counts[r][s];
        }
    }
    return counts;
}

TransitionMatrix estimate_transition_matrix(const CountMatrix& counts) {
    TransitionMatrix p;
    for (int r = 0; r < kNumStates; ++r) {
        std::int64_t row_sum = 0;
        for (int s = 0; s < kNumStates; ++s) {
            if (counts[r][s] < 0)
                throw DataError("estimate_transition_matrix: negative count");
            row_sum += counts[r][s];
        }
        if (row_sum == 0) {
            p.rows[r].fill(1.0 / kNumStates);
        } else {
            for (int s = 0; s < kNumStates; ++s)
                p.rows[r][s] = static_cast<double>(counts[r][s]) /
                               static_cast<double>(row_sum);
        }
    }
    return p;
}

StateDistribution estimate_initial_distribution(const BasketData& basket) {
    if (basket.patients.empty())
        throw DataError("estimate_initial_distribution: empty basket");
    StateDistribution pi0;
    for (const auto& patient : basket.patients) {
        if (patient.states.empty())
            throw DataError("estimate_initial_distribution: empty trajectory for patient '" +
                            patient.patient_id + "'");
        pi0.probs[static_cast<int>(patient.states.front())] += 1.0;
    }
    for (double& x : pi0.probs) x /= static_cast<double>(basket.patients.size());
    return pi0;
}

ScheduleWeights estimate_schedule_weights(const BasketData& basket) {
    if (basket.patients.empty())
        throw DataError("estimate_schedule_weights: empty basket");
    ScheduleWeights w;
    for (const auto& patient : basket.patients)
        w.weights[static_cast<int>(patient.states.size())] += 1.0;
    for (auto& [t, weight] : w.weights)
        weight /= static_cast<double>(basket.patients.size());
    return w;
}

StateDistribution weighted_final_state(const StateDistribution& pi0,
                                       const TransitionMatrix& p,
                                       const ScheduleWeights& w) {
    StateDistribution result;
    StateVector current = pi0.probs; // pi0 * P^(t-1) for the current t
    int reached_t = 1;
    for (const auto& [t, weight] : w.weights) {
        while (reached_t < t) {
            current = p.apply(current);
            ++reached_t;
        }
        for (int s = 0; s < kNumStates; ++s) result.probs[s] += weight * current[s];
    }
    result.probs = normalized(result.probs);
    return result;
}

BasketModel fit_basket(const BasketData& basket) {
    BasketModel model;
    model.basket_id = basket.basket_id;
    model.n = static_cast<int>(basket.patients.size());
    model.counts = count_transitions(basket);
    model.transition = estimate_transition_matrix(model.counts);
    model.pi0_hat = estimate_initial_distribution(basket);
    model.weights = estimate_schedule_weights(basket);
    model.final_state = weighted_final_state(model.pi0_hat, model.transition, model.weights);
    model.orr_hat = orr_estimate(basket);
    return model;
}

nlohmann::json to_json(const BasketModel& model) {
    nlohmann::json j;
    j["basket_id"] = model.basket_id;
    j["n"] = model.n;
    j["pi0_hat"] = model.pi0_hat.probs;
    j["transition"] = model.transition.rows;
    nlohmann::json weights = nlohmann::json::object();
    for (const auto& [t, w] : model.weights.weights)
        weights[std::to_string(t)] = w;
    j["weights"] = weights;
    j["final_state"] = model.final_state.probs;
    j["orr_hat"] = model.orr_hat;
    j["counts"] = model.counts;
    return j;
}

} // namespace baskets
