#pragma once

#include <cstdint>
#include <vector>

#include "baskets/clustering.hpp"

namespace baskets {

// Hyperpriors of the logistic-normal borrowing model:
//   x_j ~ Binomial(n_j, invlogit(theta_j))
//   theta_j ~ Normal(mu, 1/tau)
//   mu ~ Normal(0, mu_sd^2),  tau ~ Gamma(tau_shape, tau_rate)  (shape/rate)
struct HierarchicalPrior {
    double mu_sd = 1.0;
    double tau_shape = 2.0;
    double tau_rate = 1.0;
};

// One basket's binomial summary: responders out of sample size.
struct BasketCount {
    int responders = 0;
    int n = 0;
};

struct PosteriorSummary {
    double posterior_mean = 0.0;
    double ci_low = 0.0;  // 5% equal-tailed bound
    double ci_high = 0.0; // 95% equal-tailed bound
    bool active = false;
};

struct McmcSettings {
    int iterations = 12000;
    int burn_in = 2000;
    int thin = 1;
    std::uint64_t seed = 0;
    // Random-walk steps adapt during burn-in toward this acceptance band,
    // then freeze.
    double accept_low = 0.30;
    double accept_high = 0.45;
};

// Metropolis-within-Gibbs sampler: conjugate draws for mu and tau, a
// random-walk step on each logit-scale theta_j. Returns per-basket
// posterior mean and 5%/95% sample quantiles of p_j = invlogit(theta_j).
// Bitwise reproducible given the seed. The active flag is left false;
// see decide_active.
std::vector<PosteriorSummary> fit_hierarchical(const std::vector<BasketCount>& cluster,
                                               const HierarchicalPrior& prior,
                                               const McmcSettings& settings);

// Exact Beta(1 + x, 1 + n - x) posterior (no sampling).
PosteriorSummary fit_beta_binomial(int x, int n);

// Strict rule: active iff ci_low > threshold.
bool decide_active(const PosteriorSummary& summary, double threshold);

// Joint analysis of all baskets under a partition: every cluster
// (singletons included) gets the hierarchical model, with an MCMC seed
// derived per cluster from its smallest basket index so a cluster's draws
// depend only on its own data. Active flags are filled in.
std::vector<PosteriorSummary> analyze_trial(const std::vector<BasketCount>& baskets,
                                            const Partition& partition,
                                            const HierarchicalPrior& prior,
                                            const McmcSettings& settings,
                                            double threshold);

// Equal-tailed sample quantile with linear interpolation between order
// statistics (values must be sorted ascending).
double sorted_quantile(const std::vector<double>& sorted_values, double p);

} // namespace baskets
