#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "baskets/bayes.hpp"
#include "baskets/clustering.hpp"
#include "baskets/errors.hpp"
#include "baskets/harness.hpp"
#include "baskets/ingest.hpp"
#include "baskets/markov.hpp"
#include "baskets/scenario.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "1.0.0";

struct CommonOptions {
    std::string out_dir;
    std::uint64_t seed = 0;
    double threshold = 0.467;
    baskets::HierarchicalPrior prior;
    baskets::McmcSettings mcmc;
};

std::string default_out_dir() {
    if (const char* env = std::getenv("BASKETS_OUTPUT_DIR")) return env;
    return ".";
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--seed", opt.seed, "Master random seed");
    cmd->add_option("--threshold", opt.threshold, "Efficacy threshold for the activity decision")
        ->check(CLI::Range(1e-12, 1.0 - 1e-12));
    cmd->add_option("--out", opt.out_dir, "Output directory (default: $BASKETS_OUTPUT_DIR or .)");
    cmd->add_option("--prior-mu-sd", opt.prior.mu_sd, "SD of the normal hyperprior on mu");
    cmd->add_option("--prior-tau-shape", opt.prior.tau_shape, "Shape of the gamma prior on tau");
    cmd->add_option("--prior-tau-rate", opt.prior.tau_rate, "Rate of the gamma prior on tau");
    cmd->add_option("--mcmc-iterations", opt.mcmc.iterations, "Total MCMC iterations");
    cmd->add_option("--mcmc-burn-in", opt.mcmc.burn_in, "Burn-in iterations");
    cmd->add_option("--mcmc-thin", opt.mcmc.thin, "Thinning interval");
}

// "1".."3" select built-ins; anything else is read as a scenario file.
std::pair<baskets::ScenarioSpec, std::uint64_t> resolve_scenario(const std::string& ref,
                                                                 int n_per_basket) {
    if (ref.size() <= 2 && ref.find_first_not_of("0123456789") == std::string::npos) {
        int id = std::stoi(ref);
        return {baskets::builtin_scenario(id, n_per_basket), static_cast<std::uint64_t>(id)};
    }
    auto spec = baskets::load_scenario_file(ref);
    if (n_per_basket > 0)
        spec.n_per_basket.assign(spec.baskets.size(), n_per_basket);
    // FNV-1a of the canonical JSON keeps file-scenario streams distinct.
    std::string canonical = baskets::to_json(spec).dump();
    std::uint64_t tag = 1469598103934665603ULL;
    for (unsigned char c : canonical) tag = (tag ^ c) * 1099511628211ULL;
    return {spec, tag};
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw baskets::ConfigError("cannot write '" + path.string() + "'");
    out << content;
}

json prior_json(const baskets::HierarchicalPrior& p) {
    return {{"mu_sd", p.mu_sd}, {"tau_shape", p.tau_shape}, {"tau_rate", p.tau_rate}};
}

json mcmc_json(const baskets::McmcSettings& m) {
    return {{"iterations", m.iterations}, {"burn_in", m.burn_in}, {"thin", m.thin}};
}

void write_manifest(const fs::path& dir, json config) {
    config["version"] = kVersion;
    std::string dump = config.dump();
    std::uint64_t hash = 1469598103934665603ULL;
    for (unsigned char c : dump) hash = (hash ^ c) * 1099511628211ULL;
    config["config_hash"] = hash;
    write_file(dir / "manifest.json", config.dump(2) + "\n");
}

std::string summaries_csv(const std::vector<std::string>& basket_ids,
                          const std::string& method,
                          const std::vector<baskets::PosteriorSummary>& summaries) {
    std::ostringstream out;
    out << "basket_id,method,posterior_mean,ci_low,ci_high,active\n";
    for (std::size_t b = 0; b < summaries.size(); ++b)
        out << basket_ids[b] << ',' << method << ',' << summaries[b].posterior_mean << ','
            << summaries[b].ci_low << ',' << summaries[b].ci_high << ','
            << (summaries[b].active ? 1 : 0) << '\n';
    return out.str();
}

int cmd_simulate(const CommonOptions& opt, const std::string& scenario_ref, int n,
                 int reps, const std::vector<std::string>& arm_names, int threads) {
    baskets::HarnessConfig config;
    std::tie(config.scenario, config.scenario_tag) = resolve_scenario(scenario_ref, n);
    config.replications = reps;
    config.master_seed = opt.seed;
    config.threshold = opt.threshold;
    config.prior = opt.prior;
    config.mcmc = opt.mcmc;
    config.threads = threads;
    if (!arm_names.empty()) {
        config.arms.clear();
        for (const auto& name : arm_names) {
            auto arm = baskets::parse_arm(name);
            if (!arm) throw baskets::ConfigError("unknown arm '" + name + "'");
            config.arms.push_back(*arm);
        }
    }

    auto oc = baskets::run_simulation(config);

    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_file(dir / "clustering_results.csv", baskets::clustering_results_csv(oc));
    write_file(dir / "rejection_probs.csv", baskets::rejection_probs_csv(oc));
    write_file(dir / "posterior_summaries.csv",
               baskets::posterior_summaries_csv(oc, scenario_ref));

    json manifest = {{"command", "simulate"},
                     {"scenario", scenario_ref},
                     {"scenario_tag", config.scenario_tag},
                     {"n_per_basket", config.scenario.n_per_basket},
                     {"replications", reps},
                     {"seed", opt.seed},
                     {"threshold", opt.threshold},
                     {"prior", prior_json(opt.prior)},
                     {"mcmc", mcmc_json(opt.mcmc)},
                     {"threads", threads}};
    json arms = json::array();
    for (auto arm : config.arms) arms.push_back(baskets::to_string(arm));
    manifest["arms"] = arms;
    write_manifest(dir, manifest);

    std::cout << "wrote clustering_results.csv, rejection_probs.csv, "
                 "posterior_summaries.csv, manifest.json to "
              << dir.string() << "\n";
    return 0;
}

int cmd_analyze(const CommonOptions& opt, const std::string& data_path, bool bayes) {
    auto data = baskets::ingest_csv_file(data_path);

    std::vector<baskets::BasketModel> models;
    std::vector<std::string> basket_ids;
    std::vector<baskets::FeatureVector> features;
    std::vector<baskets::BasketCount> counts;
    for (const auto& basket : data) {
        models.push_back(baskets::fit_basket(basket));
        basket_ids.push_back(basket.basket_id);
        features.push_back(baskets::feature_vector(models.back()));
        counts.push_back({baskets::responder_count(basket),
                          static_cast<int>(basket.patients.size())});
    }

    baskets::Partition partition = data.size() >= 2
                                       ? baskets::select_clustering(features)
                                       : baskets::Partition::single_cluster(1);

    fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    write_file(dir / "partition.json", baskets::to_json(partition).dump(2) + "\n");

    json models_json = json::array();
    for (const auto& model : models) models_json.push_back(baskets::to_json(model));
    write_file(dir / "basket_models.json", models_json.dump(2) + "\n");

    if (bayes) {
        auto summaries = baskets::analyze_trial(counts, partition, opt.prior, opt.mcmc,
                                                opt.threshold);
        write_file(dir / "basket_summaries.csv",
                   summaries_csv(basket_ids, "hierarchical", summaries));
    }

    json manifest = {{"command", bayes ? "analyze" : "cluster"},
                     {"data", data_path},
                     {"seed", opt.seed},
                     {"threshold", opt.threshold},
                     {"prior", prior_json(opt.prior)},
                     {"mcmc", mcmc_json(opt.mcmc)}};
    write_manifest(dir, manifest);

    std::cout << "selected " << partition.cluster_count << " cluster(s) over "
              << data.size() << " basket(s); reports written to " << dir.string() << "\n";
    return 0;
}

int cmd_derive_threshold(const CommonOptions& opt, const std::string& scenario_ref,
                         int basket_index, long reps) {
    if (reps < 1) throw baskets::ConfigError("derive-threshold: reps must be >= 1");
    auto [spec, tag] = resolve_scenario(scenario_ref, 1);
    if (basket_index < 0 || basket_index >= spec.basket_count())
        throw baskets::ConfigError("derive-threshold: basket index out of range");

    baskets::RngStream rng = baskets::RngStream::derive(opt.seed, {tag, 0xDEC1DEULL});
    auto est = baskets::true_orr(spec.baskets[static_cast<std::size_t>(basket_index)],
                                 spec.length_probs, reps, rng);
    std::cout << "true_orr " << est.value << " mc_se " << est.std_error << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Basket-trial clustering and borrowing toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    CommonOptions opt;
    opt.out_dir = default_out_dir();

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Run replicated scenario simulations");
    std::string scenario_ref = "1";
    int n = 20;
    int reps = 5000;
    int threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::string> arm_names;
    simulate->add_option("--scenario", scenario_ref, "Built-in scenario id (1-3) or JSON file");
    simulate->add_option("--n", n, "Patients per basket")->check(CLI::PositiveNumber);
    simulate->add_option("--reps", reps, "Replications")->check(CLI::PositiveNumber);
    simulate->add_option("--arms", arm_names,
                         "Arms to run (proposed, orr_only, one_cluster, no_cluster)");
    simulate->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    add_common_flags(simulate, opt);

    // analyze / cluster
    auto* analyze = app.add_subcommand("analyze", "Cluster and analyze an observed dataset");
    std::string data_path;
    analyze->add_option("--data", data_path, "Assessment CSV")->required();
    add_common_flags(analyze, opt);

    auto* cluster = app.add_subcommand("cluster", "Clustering only, no posterior analysis");
    cluster->add_option("--data", data_path, "Assessment CSV")->required();
    add_common_flags(cluster, opt);

    // derive-threshold
    auto* derive = app.add_subcommand("derive-threshold",
                                      "Monte Carlo estimate of a basket's true ORR");
    int basket_index = 0;
    long orr_reps = 20000000;
    derive->add_option("--scenario", scenario_ref, "Built-in scenario id (1-3) or JSON file");
    derive->add_option("--basket", basket_index, "Basket index (0-based)");
    derive->add_option("--reps", orr_reps, "Simulated patients");
    add_common_flags(derive, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed())
            return cmd_simulate(opt, scenario_ref, n, reps, arm_names, threads);
        if (analyze->parsed()) return cmd_analyze(opt, data_path, true);
        if (cluster->parsed()) return cmd_analyze(opt, data_path, false);
        if (derive->parsed())
            return cmd_derive_threshold(opt, scenario_ref, basket_index, orr_reps);
    } catch (const baskets::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const baskets::DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return 2;
    } catch (const baskets::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
