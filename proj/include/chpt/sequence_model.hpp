#pragma once

#include <span>
#include <vector>

#include "chpt/core.hpp"
#include "chpt/functional.hpp"
#include "chpt/rng.hpp"

namespace chpt {

// Index convention: vectors below are 0-based, entry k-1 belongs to k = 1..n.

/// Prefix sums S_k and the profile statistics U_k = S_k^2 / (2 eps^2 k).
struct CumulativeStats {
    std::vector<double> prefix_sums;
    std::vector<double> u;
    int n = 0;
    double eps = 1.0;
};

/// Generalized posterior under a flat prior on theta and a uniform prior on
/// tau: P(tau = k | X) = weights[k-1], theta | tau = k ~ N(cond_means, cond_vars).
struct PosteriorSummary {
    std::vector<double> weights;
    std::vector<double> cond_means;
    std::vector<double> cond_vars;
    std::vector<double> prefix_sums;
};

struct MleEstimate {
    int tau = 1;
    double theta = 0.0;
    double l = 0.0;
};

struct BayesEstimate {
    double tau = 1.0;
    double theta = 0.0;
    double l = 0.0;
};

struct EstimateSet {
    int tau_mle = 1;
    double theta_mle = 0.0;
    double l_mle = 0.0;
    double tau_bayes = 1.0;
    double theta_bayes = 0.0;
    double l_bayes = 0.0;
};

SequenceSample generate_sequence(const ModelParams& params, RngStream rng);

CumulativeStats cumulative_stats(std::span<const double> x, double eps);

/// argmax_k U_k; ties go to the smallest k.
int mle_tau(const CumulativeStats& stats);

MleEstimate mle_estimates(std::span<const double> x, double eps, const Functional& fn);
MleEstimate mle_estimates(const SequenceSample& sample, const Functional& fn);

/// Weights p_k proportional to exp(U_k) / sqrt(k), normalized in the log
/// domain.
PosteriorSummary bayes_posterior(const CumulativeStats& stats);

/// Posterior mean of L: sum_k p_k E[L(Theta, k)], Theta ~ N(Xbar_k, eps^2/k).
/// Throws std::domain_error if the result is not finite.
double bayes_functional(const PosteriorSummary& post, const Functional& fn);
/// Same, but always through Gauss-Hermite quadrature.
double bayes_functional_quadrature(const PosteriorSummary& post, const Functional& fn);

BayesEstimate bayes_estimates(std::span<const double> x, double eps, const Functional& fn);
BayesEstimate bayes_estimates(const SequenceSample& sample, const Functional& fn);

/// Both estimator families from a single pass over the sample.
EstimateSet estimate_all(std::span<const double> x, double eps, const Functional& fn);

/// log p(X; theta, tau) including the -(n/2) log(2 pi eps^2) constant.
double log_likelihood(std::span<const double> x, double theta, int tau, double eps);

}  // namespace chpt
