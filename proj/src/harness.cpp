#include "baskets/harness.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <sstream>
#include <thread>

#include "baskets/errors.hpp"

namespace baskets {
namespace {

// Tag separating MCMC seed derivations from patient-data derivations.
constexpr std::uint64_t kMcmcTag = 0x4D434D43ULL;

std::uint64_t arm_index(MethodArm arm) { return static_cast<std::uint64_t>(arm); }

} // namespace

const char* to_string(MethodArm arm) {
    switch (arm) {
        case MethodArm::Proposed: return "proposed";
        case MethodArm::OrrOnly: return "orr_only";
        case MethodArm::OneCluster: return "one_cluster";
        case MethodArm::NoCluster: return "no_cluster";
    }
    return "?";
}

std::optional<MethodArm> parse_arm(const std::string& name) {
    for (MethodArm arm : kAllArms)
        if (name == to_string(arm)) return arm;
    return std::nullopt;
}

bool correct_structure(const std::vector<int>& labels, const std::vector<int>& truth) {
    if (labels.size() != truth.size())
        throw ConfigError("correct_structure: label vectors of unequal length");
    // Canonicalize both by first-occurrence relabeling.
    auto canonical = [](const std::vector<int>& v) {
        std::vector<int> out(v.size());
        std::map<int, int> remap;
        for (std::size_t i = 0; i < v.size(); ++i) {
            auto [it, inserted] = remap.emplace(v[i], static_cast<int>(remap.size()));
            out[i] = it->second;
        }
        return out;
    };
    return canonical(labels) == canonical(truth);
}

ReplicationResult run_replication(const HarnessConfig& config, int replication) {
    const ScenarioSpec& spec = config.scenario;
    const int j = spec.basket_count();

    std::vector<BasketModel> models;
    models.reserve(static_cast<std::size_t>(j));
    ReplicationResult result;
    result.baskets.reserve(static_cast<std::size_t>(j));
    for (int b = 0; b < j; ++b) {
        BasketData data = simulate_basket(
            spec.baskets[static_cast<std::size_t>(b)], spec.length_probs,
            spec.n_per_basket[static_cast<std::size_t>(b)],
            "B" + std::to_string(b + 1), config.master_seed, config.scenario_tag,
            static_cast<std::uint64_t>(replication), static_cast<std::uint64_t>(b));
        models.push_back(fit_basket(data));
        result.baskets.push_back(
            {responder_count(data), static_cast<int>(data.patients.size())});
    }

    for (MethodArm arm : config.arms) {
        ArmReplication rep;
        if (arm == MethodArm::NoCluster) {
            rep.summaries.reserve(static_cast<std::size_t>(j));
            for (const auto& basket : result.baskets) {
                PosteriorSummary s = fit_beta_binomial(basket.responders, basket.n);
                s.active = decide_active(s, config.threshold);
                rep.summaries.push_back(s);
            }
        } else {
            Partition partition;
            if (arm == MethodArm::OneCluster) {
                partition = Partition::single_cluster(j);
            } else {
                std::vector<FeatureVector> features;
                features.reserve(models.size());
                for (const auto& model : models)
                    features.push_back(arm == MethodArm::Proposed
                                           ? feature_vector(model)
                                           : orr_feature_vector(model));
                partition = select_clustering(features);
            }
            McmcSettings settings = config.mcmc;
            settings.seed = derive_seed(config.master_seed,
                                        {config.scenario_tag,
                                         static_cast<std::uint64_t>(replication),
                                         kMcmcTag, arm_index(arm)});
            rep.summaries = analyze_trial(result.baskets, partition, config.prior,
                                          settings, config.threshold);
            rep.partition = std::move(partition);
        }
        result.arms.emplace(arm, std::move(rep));
    }
    return result;
}

OperatingCharacteristics aggregate(const std::vector<ReplicationResult>& results,
                                   const std::vector<int>& true_partition) {
    if (results.empty()) throw ConfigError("aggregate: no replications");
    const std::size_t j = results.front().baskets.size();

    OperatingCharacteristics oc;
    oc.replications = static_cast<int>(results.size());

    for (const auto& [arm, first_rep] : results.front().arms) {
        ArmCharacteristics ac;
        ac.clustering_applicable = first_rep.partition.has_value();
        ac.cluster_count_percent.assign(j, 0.0);
        ac.rejection_percent.assign(j, 0.0);
        ac.mean_posterior_mean.assign(j, 0.0);
        ac.mean_ci_low.assign(j, 0.0);
        ac.mean_ci_high.assign(j, 0.0);

        for (const auto& rep : results) {
            const ArmReplication& ar = rep.arms.at(arm);
            if (ar.partition) {
                int u = ar.partition->cluster_count;
                ac.cluster_count_percent[static_cast<std::size_t>(u - 1)] += 1.0;
                if (correct_structure(ar.partition->labels, true_partition))
                    ac.correct_structure_percent += 1.0;
            }
            for (std::size_t b = 0; b < j; ++b) {
                const PosteriorSummary& s = ar.summaries[b];
                if (s.active) ac.rejection_percent[b] += 1.0;
                ac.mean_posterior_mean[b] += s.posterior_mean;
                ac.mean_ci_low[b] += s.ci_low;
                ac.mean_ci_high[b] += s.ci_high;
            }
        }

        const double r = static_cast<double>(results.size());
        for (double& v : ac.cluster_count_percent) v *= 100.0 / r;
        ac.correct_structure_percent *= 100.0 / r;
        for (std::size_t b = 0; b < j; ++b) {
            ac.rejection_percent[b] *= 100.0 / r;
            ac.mean_posterior_mean[b] /= r;
            ac.mean_ci_low[b] /= r;
            ac.mean_ci_high[b] /= r;
        }
        oc.arms.emplace(arm, std::move(ac));
    }
    return oc;
}

OperatingCharacteristics run_simulation(const HarnessConfig& config) {
    config.scenario.validate();
    if (config.replications < 1)
        throw ConfigError("run_simulation: replications must be >= 1");
    if (!(config.threshold > 0.0 && config.threshold < 1.0))
        throw ConfigError("run_simulation: threshold must be in (0, 1)");

    std::vector<ReplicationResult> results(static_cast<std::size_t>(config.replications));
    const int threads = std::max(1, config.threads);
    if (threads == 1) {
        for (int r = 0; r < config.replications; ++r)
            results[static_cast<std::size_t>(r)] = run_replication(config, r);
    } else {
        std::atomic<int> next{0};
        std::vector<std::thread> pool;
        std::atomic<bool> failed{false};
        std::string error_message;
        std::mutex error_mutex;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&] {
                for (;;) {
                    int r = next.fetch_add(1);
                    if (r >= config.replications || failed.load()) return;
                    try {
                        results[static_cast<std::size_t>(r)] = run_replication(config, r);
                    } catch (const std::exception& e) {
                        std::lock_guard<std::mutex> lock(error_mutex);
                        error_message = "replication " + std::to_string(r) + " (seed " +
                                        std::to_string(config.master_seed) + "): " + e.what();
                        failed.store(true);
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (failed.load()) throw NumericalError(error_message);
    }
    return aggregate(results, config.scenario.true_partition);
}

std::string clustering_results_csv(const OperatingCharacteristics& oc) {
    std::ostringstream out;
    std::size_t j = oc.arms.empty() ? 0 : oc.arms.begin()->second.rejection_percent.size();
    out << "arm";
    for (std::size_t u = 1; u <= j; ++u) out << ",selected_" << u << "_percent";
    out << ",correct_structure_percent\n";
    for (const auto& [arm, ac] : oc.arms) {
        if (!ac.clustering_applicable) continue;
        out << to_string(arm);
        for (double v : ac.cluster_count_percent) out << ',' << v;
        out << ',' << ac.correct_structure_percent << '\n';
    }
    return out.str();
}

std::string rejection_probs_csv(const OperatingCharacteristics& oc) {
    std::ostringstream out;
    out << "arm,basket,rejection_percent\n";
    for (const auto& [arm, ac] : oc.arms)
        for (std::size_t b = 0; b < ac.rejection_percent.size(); ++b)
            out << to_string(arm) << ',' << (b + 1) << ',' << ac.rejection_percent[b] << '\n';
    return out.str();
}

std::string posterior_summaries_csv(const OperatingCharacteristics& oc,
                                    const std::string& scenario_name) {
    std::ostringstream out;
    out << "scenario,arm,basket,mean_posterior_mean,mean_ci_low,mean_ci_high\n";
    for (const auto& [arm, ac] : oc.arms)
        for (std::size_t b = 0; b < ac.mean_posterior_mean.size(); ++b)
            out << scenario_name << ',' << to_string(arm) << ',' << (b + 1) << ','
                << ac.mean_posterior_mean[b] << ',' << ac.mean_ci_low[b] << ','
                << ac.mean_ci_high[b] << '\n';
    return out.str();
}

} // namespace baskets
