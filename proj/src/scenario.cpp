#include "baskets/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "baskets/errors.hpp"

namespace baskets {
namespace {

constexpr double kRowSumTol = 1e-6;

const std::vector<double> kLengthProbs = {0.03, 0.05, 0.25, 0.25, 0.20,
                                          0.10, 0.05, 0.03, 0.02, 0.02};

StateDistribution dist(double cr, double pr, double sd, double pd) {
    return StateDistribution{{cr, pr, sd, pd}};
}

TransitionMatrix matrix(std::initializer_list<StateVector> rows) {
    TransitionMatrix m;
    int r = 0;
    for (const auto& row : rows) m.rows[r++] = row;
    return m;
}

// Shared by Scenario 1 and the first group of Scenarios 2 and 3.
const BasketTruth kReferenceTruth{
    dist(0.05, 0.10, 0.35, 0.50),
    matrix({StateVector{0.60, 0.00, 0.00, 0.40},
            StateVector{0.10, 0.40, 0.10, 0.40},
            StateVector{0.05, 0.20, 0.40, 0.35},
            StateVector{0.00, 0.05, 0.35, 0.60}})};

const BasketTruth kImprovedTruth{
    dist(0.075, 0.150, 0.425, 0.350),
    matrix({StateVector{0.675, 0.000, 0.000, 0.325},
            StateVector{0.150, 0.475, 0.100, 0.275},
            StateVector{0.075, 0.250, 0.400, 0.275},
            StateVector{0.025, 0.100, 0.325, 0.550}})};

const BasketTruth kDistinctTruth{
    dist(0.10, 0.20, 0.50, 0.20),
    matrix({StateVector{0.75, 0.00, 0.00, 0.25},
            StateVector{0.20, 0.55, 0.10, 0.15},
            StateVector{0.10, 0.30, 0.40, 0.20},
            StateVector{0.05, 0.15, 0.30, 0.50}})};

} // namespace

void ScenarioSpec::validate() const {
    if (baskets.empty()) throw ConfigError("scenario: no baskets");
    if (n_per_basket.size() != baskets.size())
        throw ConfigError("scenario: n_per_basket size mismatch");
    for (int n : n_per_basket)
        if (n < 1) throw ConfigError("scenario: basket sample size must be >= 1");
    if (true_partition.size() != baskets.size())
        throw ConfigError("scenario: true_partition size mismatch");
    if (length_probs.empty())
        throw ConfigError("scenario: empty length distribution");
    double total = std::accumulate(length_probs.begin(), length_probs.end(), 0.0);
    if (std::abs(total - 1.0) > kRowSumTol)
        throw ConfigError("scenario: length distribution does not sum to 1");
    for (const auto& basket : baskets) {
        if (std::abs(basket.pi0.sum() - 1.0) > kRowSumTol)
            throw ConfigError("scenario: initial distribution does not sum to 1");
        for (const auto& row : basket.transition.rows) {
            double s = std::accumulate(row.begin(), row.end(), 0.0);
            if (std::abs(s - 1.0) > kRowSumTol)
                throw ConfigError("scenario: transition matrix row does not sum to 1");
        }
    }
}

ScenarioSpec builtin_scenario(int id, int n_per_basket) {
    if (n_per_basket < 1) throw ConfigError("scenario: n must be >= 1");
    ScenarioSpec spec;
    spec.length_probs = kLengthProbs;
    spec.n_per_basket.assign(5, n_per_basket);
    switch (id) {
        case 1:
            spec.baskets.assign(5, kReferenceTruth);
            spec.true_partition = {0, 0, 0, 0, 0};
            break;
        case 2:
            spec.baskets = {kReferenceTruth, kReferenceTruth, kReferenceTruth,
                            kImprovedTruth, kImprovedTruth};
            spec.true_partition = {0, 0, 0, 1, 1};
            break;
        case 3:
            spec.baskets = {kReferenceTruth, kReferenceTruth, kImprovedTruth,
                            kImprovedTruth, kDistinctTruth};
            spec.true_partition = {0, 0, 1, 1, 2};
            break;
        default:
            throw ConfigError("unknown scenario '" + std::to_string(id) + "'");
    }
    spec.validate();
    return spec;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec spec;
    try {
        for (const auto& b : j.at("baskets")) {
            BasketTruth truth;
            auto pi0 = b.at("pi0").get<std::vector<double>>();
            if (pi0.size() != kNumStates)
                throw ConfigError("scenario: pi0 must have 4 entries");
            std::copy(pi0.begin(), pi0.end(), truth.pi0.probs.begin());
            auto p = b.at("P").get<std::vector<std::vector<double>>>();
            if (p.size() != kNumStates)
                throw ConfigError("scenario: P must be 4x4");
            for (int r = 0; r < kNumStates; ++r) {
                if (p[r].size() != kNumStates)
                    throw ConfigError("scenario: P must be 4x4");
                std::copy(p[r].begin(), p[r].end(), truth.transition.rows[r].begin());
            }
            spec.baskets.push_back(truth);
        }
        if (j.at("n_per_basket").is_array())
            spec.n_per_basket = j.at("n_per_basket").get<std::vector<int>>();
        else
            spec.n_per_basket.assign(spec.baskets.size(), j.at("n_per_basket").get<int>());
        spec.length_probs = j.at("length_probs").get<std::vector<double>>();
        if (j.contains("true_partition"))
            spec.true_partition = j.at("true_partition").get<std::vector<int>>();
        else
            spec.true_partition.assign(spec.baskets.size(), 0);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("scenario file: ") + e.what());
    }
    spec.validate();
    return spec;
}

nlohmann::json to_json(const ScenarioSpec& spec) {
    nlohmann::json j;
    j["baskets"] = nlohmann::json::array();
    for (const auto& b : spec.baskets) {
        nlohmann::json basket;
        basket["pi0"] = b.pi0.probs;
        basket["P"] = b.transition.rows;
        j["baskets"].push_back(basket);
    }
    j["n_per_basket"] = spec.n_per_basket;
    j["length_probs"] = spec.length_probs;
    j["true_partition"] = spec.true_partition;
    return j;
}

ScenarioSpec load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("scenario file '" + path + "': " + e.what());
    }
    return scenario_from_json(j);
}

namespace {

Trajectory simulate_patient(const BasketTruth& truth,
                            const std::vector<double>& length_probs,
                            RngStream& rng, std::uint64_t patient_index) {
    Trajectory traj;
    traj.patient_id = "p" + std::to_string(patient_index + 1);
    int t = rng.categorical(length_probs) + 1;
    int state = rng.categorical(truth.pi0.probs);
    traj.states.push_back(static_cast<ResponseState>(state));
    for (int l = 1; l < t; ++l) {
        state = rng.categorical(truth.transition.rows[state]);
        traj.states.push_back(static_cast<ResponseState>(state));
    }
    return traj;
}

} // namespace

BasketData simulate_basket(const BasketTruth& truth,
                           const std::vector<double>& length_probs,
                           int n, const std::string& basket_id,
                           std::uint64_t master_seed, std::uint64_t scenario_tag,
                           std::uint64_t replication, std::uint64_t basket_index) {
    BasketData basket;
    basket.basket_id = basket_id;
    basket.patients.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        RngStream rng = RngStream::derive(
            master_seed,
            {scenario_tag, replication, basket_index, static_cast<std::uint64_t>(i)});
        basket.patients.push_back(
            simulate_patient(truth, length_probs, rng, static_cast<std::uint64_t>(i)));
    }
    return basket;
}

MonteCarloEstimate true_orr(const BasketTruth& truth,
                            const std::vector<double>& length_probs,
                            long reps, RngStream& rng) {
    if (reps < 1) throw ConfigError("true_orr: reps must be >= 1");
    long hits = 0;
    for (long i = 0; i < reps; ++i) {
        int t = rng.categorical(length_probs) + 1;
        int state = rng.categorical(truth.pi0.probs);
        bool responded = state <= static_cast<int>(ResponseState::PR);
        for (int l = 1; l < t && !responded; ++l) {
            state = rng.categorical(truth.transition.rows[state]);
            responded = state <= static_cast<int>(ResponseState::PR);
        }
        if (responded) ++hits;
    }
    MonteCarloEstimate est;
    est.value = static_cast<double>(hits) / static_cast<double>(reps);
    est.std_error = std::sqrt(est.value * (1.0 - est.value) / static_cast<double>(reps));
    return est;
}

double exact_orr(const BasketTruth& truth, const std::vector<double>& length_probs) {
    // Track mass that has stayed inside {SD, PD} through each assessment.
    const int sd = static_cast<int>(ResponseState::SD);
    const int pd = static_cast<int>(ResponseState::PD);
    double no_hit_sd = truth.pi0.probs[sd];
    double no_hit_pd = truth.pi0.probs[pd];
    double orr = 0.0;
    for (std::size_t t = 1; t <= length_probs.size(); ++t) {
        orr += length_probs[t - 1] * (1.0 - no_hit_sd - no_hit_pd);
        double next_sd = no_hit_sd * truth.transition.rows[sd][sd] +
                         no_hit_pd * truth.transition.rows[pd][sd];
        double next_pd = no_hit_sd * truth.transition.rows[sd][pd] +
                         no_hit_pd * truth.transition.rows[pd][pd];
        no_hit_sd = next_sd;
        no_hit_pd = next_pd;
    }
    return orr;
}

} // namespace baskets
