#include "baskets/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "baskets/beta_dist.hpp"
#include "baskets/errors.hpp"
#include "baskets/rng.hpp"

namespace baskets {
namespace {

double invlogit(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

// log(1 + exp(x)) without overflow
double softplus(double x) {
    return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

// Binomial log-likelihood in theta (logit scale), constants dropped.
double binom_loglik(double theta, int x, int n) {
    return static_cast<double>(x) * theta - static_cast<double>(n) * softplus(theta);
}

void validate(const McmcSettings& s) {
    if (s.iterations <= s.burn_in || s.burn_in < 0)
        throw ConfigError("mcmc: requires iterations > burn_in >= 0");
    if (s.thin < 1) throw ConfigError("mcmc: thin must be >= 1");
    if (!(s.accept_low > 0.0 && s.accept_high < 1.0 && s.accept_low < s.accept_high))
        throw ConfigError("mcmc: invalid acceptance band");
}

} // namespace

double sorted_quantile(const std::vector<double>& sorted_values, double p) {
    if (sorted_values.empty())
        throw ConfigError("sorted_quantile: empty sample");
    const std::size_t m = sorted_values.size();
    double h = p * static_cast<double>(m - 1);
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = std::min(lo + 1, m - 1);
    double frac = h - static_cast<double>(lo);
    return sorted_values[lo] * (1.0 - frac) + sorted_values[hi] * frac;
}

std::vector<PosteriorSummary> fit_hierarchical(const std::vector<BasketCount>& cluster,
                                               const HierarchicalPrior& prior,
                                               const McmcSettings& settings) {
    validate(settings);
    if (cluster.empty()) throw ConfigError("fit_hierarchical: empty cluster");
    if (!(prior.mu_sd > 0.0 && prior.tau_shape > 0.0 && prior.tau_rate > 0.0))
        throw ConfigError("fit_hierarchical: prior parameters must be positive");
    for (const auto& b : cluster)
        if (b.n < 1 || b.responders < 0 || b.responders > b.n)
            throw DataError("fit_hierarchical: requires 0 <= x <= n, n >= 1");

    const std::size_t j = cluster.size();
    RngStream rng(settings.seed);

    std::vector<double> theta(j), step(j, 1.0), loglik(j);
    std::vector<int> accepted(j, 0);
    for (std::size_t k = 0; k < j; ++k) {
        // stabilized empirical logit
        double p0 = (cluster[k].responders + 0.5) / (cluster[k].n + 1.0);
        theta[k] = std::log(p0 / (1.0 - p0));
        loglik[k] = binom_loglik(theta[k], cluster[k].responders, cluster[k].n);
    }
    double mu = 0.0;
    double tau = prior.tau_shape / prior.tau_rate;
    const double mu_prior_precision = 1.0 / (prior.mu_sd * prior.mu_sd);

    constexpr int kAdaptInterval = 50;
    const int kept_count = (settings.iterations - settings.burn_in + settings.thin - 1) / settings.thin;
    std::vector<std::vector<double>> draws(j);
    for (auto& v : draws) v.reserve(static_cast<std::size_t>(kept_count));

    for (int iter = 0; iter < settings.iterations; ++iter) {
        for (std::size_t k = 0; k < j; ++k) {
            double proposal = theta[k] + step[k] * rng.normal();
            double prop_loglik = binom_loglik(proposal, cluster[k].responders, cluster[k].n);
            double dtheta_old = theta[k] - mu;
            double dtheta_new = proposal - mu;
            double log_ratio = prop_loglik - loglik[k] +
                               0.5 * tau * (dtheta_old * dtheta_old - dtheta_new * dtheta_new);
            if (std::log(1.0 - rng.uniform()) < log_ratio) {
                theta[k] = proposal;
                loglik[k] = prop_loglik;
                ++accepted[k];
            }
        }

        double theta_sum = 0.0;
        for (double t : theta) theta_sum += t;
        double post_precision = tau * static_cast<double>(j) + mu_prior_precision;
        double post_mean = tau * theta_sum / post_precision;
        mu = post_mean + rng.normal() / std::sqrt(post_precision);

        double ss = 0.0;
        for (double t : theta) ss += (t - mu) * (t - mu);
        tau = rng.gamma(prior.tau_shape + 0.5 * static_cast<double>(j),
                        prior.tau_rate + 0.5 * ss);

        if (!std::isfinite(mu) || !std::isfinite(tau) || tau <= 0.0)
            throw NumericalError("fit_hierarchical: non-finite sampler state at iteration " +
                                 std::to_string(iter));

        if (iter < settings.burn_in && (iter + 1) % kAdaptInterval == 0) {
            for (std::size_t k = 0; k < j; ++k) {
                double rate = static_cast<double>(accepted[k]) / kAdaptInterval;
                if (rate < settings.accept_low) step[k] /= 1.4;
                else if (rate > settings.accept_high) step[k] *= 1.4;
                accepted[k] = 0;
            }
        }

        if (iter >= settings.burn_in && (iter - settings.burn_in) % settings.thin == 0)
            for (std::size_t k = 0; k < j; ++k)
                draws[k].push_back(invlogit(theta[k]));
    }

    std::vector<PosteriorSummary> summaries(j);
    for (std::size_t k = 0; k < j; ++k) {
        auto& sample = draws[k];
        double mean = 0.0;
        for (double v : sample) mean += v;
        mean /= static_cast<double>(sample.size());
        std::sort(sample.begin(), sample.end());
        summaries[k].posterior_mean = mean;
        summaries[k].ci_low = sorted_quantile(sample, 0.05);
        summaries[k].ci_high = sorted_quantile(sample, 0.95);
        if (!std::isfinite(mean))
            throw NumericalError("fit_hierarchical: non-finite posterior mean");
    }
    return summaries;
}

PosteriorSummary fit_beta_binomial(int x, int n) {
    if (n < 1 || x < 0 || x > n)
        throw DataError("fit_beta_binomial: requires 0 <= x <= n, n >= 1");
    const double a = 1.0 + x;
    const double b = 1.0 + n - x;
    PosteriorSummary s;
    s.posterior_mean = a / (a + b);
    s.ci_low = beta_quantile(a, b, 0.05);
    s.ci_high = beta_quantile(a, b, 0.95);
    return s;
}

bool decide_active(const PosteriorSummary& summary, double threshold) {
    return summary.ci_low > threshold;
}

std::vector<PosteriorSummary> analyze_trial(const std::vector<BasketCount>& baskets,
                                            const Partition& partition,
                                            const HierarchicalPrior& prior,
                                            const McmcSettings& settings,
                                            double threshold) {
    if (partition.labels.size() != baskets.size())
        throw ConfigError("analyze_trial: partition does not cover all baskets");

    std::map<int, std::vector<std::size_t>> clusters;
    for (std::size_t k = 0; k < baskets.size(); ++k)
        clusters[partition.labels[k]].push_back(k);

    std::vector<PosteriorSummary> out(baskets.size());
    for (const auto& [label, members] : clusters) {
        std::vector<BasketCount> cluster_data;
        cluster_data.reserve(members.size());
        for (std::size_t k : members) cluster_data.push_back(baskets[k]);

        McmcSettings cluster_settings = settings;
        cluster_settings.seed =
            derive_seed(settings.seed, {static_cast<std::uint64_t>(members.front())});
        auto summaries = fit_hierarchical(cluster_data, prior, cluster_settings);
        for (std::size_t m = 0; m < members.size(); ++m) {
            summaries[m].active = decide_active(summaries[m], threshold);
            out[members[m]] = summaries[m];
        }
    }
    return out;
}

} // namespace baskets
