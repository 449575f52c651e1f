#include "chpt/sequence_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace chpt {

namespace {

void require_eps(double eps, const char* who) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw std::invalid_argument(std::string(who) + ": eps must be finite and > 0");
}

}  // namespace

SequenceSample generate_sequence(const ModelParams& params, RngStream rng) {
    params.validate();
    SequenceSample sample;
    sample.params = params;
    sample.seed = rng.seed;
    sample.replication_index = rng.stream_id;
    sample.x.resize(params.n);
    NormalSampler xi(rng);
    for (int i = 1; i <= params.n; ++i) {
        const double signal = i <= params.tau ? params.theta : 0.0;
        sample.x[i - 1] = signal + params.eps * xi();
    }
    return sample;
}

CumulativeStats cumulative_stats(std::span<const double> x, double eps) {
    if (x.empty()) throw std::invalid_argument("cumulative_stats: empty input");
    require_eps(eps, "cumulative_stats");
    CumulativeStats stats;
    stats.n = static_cast<int>(x.size());
    stats.eps = eps;
    stats.prefix_sums.resize(x.size());
    stats.u.resize(x.size());
    const double two_eps2 = 2.0 * eps * eps;
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!std::isfinite(x[i])) throw std::invalid_argument("cumulative_stats: non-finite observation");
        s += x[i];
        stats.prefix_sums[i] = s;
        stats.u[i] = s * s / (two_eps2 * static_cast<double>(i + 1));
    }
    return stats;
}

int mle_tau(const CumulativeStats& stats) {
    // max_element returns the first maximum, i.e. the smallest k.
    const auto it = std::max_element(stats.u.begin(), stats.u.end());
    return static_cast<int>(it - stats.u.begin()) + 1;
}

MleEstimate mle_estimates(std::span<const double> x, double eps, const Functional& fn) {
    const auto stats = cumulative_stats(x, eps);
    MleEstimate est;
    est.tau = mle_tau(stats);
    est.theta = stats.prefix_sums[est.tau - 1] / est.tau;
    est.l = fn(est.theta, est.tau);
    return est;
}

MleEstimate mle_estimates(const SequenceSample& sample, const Functional& fn) {
    return mle_estimates(sample.x, sample.params.eps, fn);
}

PosteriorSummary bayes_posterior(const CumulativeStats& stats) {
    const std::size_t n = stats.u.size();
    PosteriorSummary post;
    post.weights.resize(n);
    post.cond_means.resize(n);
    post.cond_vars.resize(n);
    post.prefix_sums = stats.prefix_sums;

    std::vector<double> log_w(n);
    for (std::size_t i = 0; i < n; ++i) log_w[i] = stats.u[i] - 0.5 * std::log(static_cast<double>(i + 1));
    const double top = *std::max_element(log_w.begin(), log_w.end());
    CompensatedSum z;
    for (std::size_t i = 0; i < n; ++i) {
        post.weights[i] = std::exp(log_w[i] - top);
        z.add(post.weights[i]);
    }
    const double norm = z.value();
    const double eps2 = stats.eps * stats.eps;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = static_cast<double>(i + 1);
        post.weights[i] /= norm;
        post.cond_means[i] = stats.prefix_sums[i] / k;
        post.cond_vars[i] = eps2 / k;
    }
    return post;
}

namespace {

template <class Eval>
double posterior_average(const PosteriorSummary& post, Eval&& eval) {
    CompensatedSum acc;
    for (std::size_t i = 0; i < post.weights.size(); ++i) {
        const int k = static_cast<int>(i + 1);
        acc.add(post.weights[i] * eval(post.cond_means[i], post.cond_vars[i], k));
    }
    const double v = acc.value();
    if (!std::isfinite(v))
        throw std::domain_error("bayes estimate of the functional is not finite under the flat prior");
    return v;
}

}  // namespace

double bayes_functional(const PosteriorSummary& post, const Functional& fn) {
    return posterior_average(post, [&](double m, double v, int k) { return gaussian_mean(fn, m, v, k); });
}

double bayes_functional_quadrature(const PosteriorSummary& post, const Functional& fn) {
    return posterior_average(post,
                             [&](double m, double v, int k) { return gaussian_mean_quadrature(fn, m, v, k); });
}

namespace {

BayesEstimate bayes_from_posterior(const PosteriorSummary& post, const Functional& fn) {
    BayesEstimate est;
    CompensatedSum tau_acc;
    CompensatedSum theta_acc;
    for (std::size_t i = 0; i < post.weights.size(); ++i) {
        tau_acc.add(post.weights[i] * static_cast<double>(i + 1));
        theta_acc.add(post.weights[i] * post.cond_means[i]);
    }
    est.tau = tau_acc.value();
    est.theta = theta_acc.value();
    est.l = bayes_functional(post, fn);
    return est;
}

}  // namespace

BayesEstimate bayes_estimates(std::span<const double> x, double eps, const Functional& fn) {
    return bayes_from_posterior(bayes_posterior(cumulative_stats(x, eps)), fn);
}

BayesEstimate bayes_estimates(const SequenceSample& sample, const Functional& fn) {
    return bayes_estimates(sample.x, sample.params.eps, fn);
}

EstimateSet estimate_all(std::span<const double> x, double eps, const Functional& fn) {
    const auto stats = cumulative_stats(x, eps);
    EstimateSet out;
    out.tau_mle = mle_tau(stats);
    out.theta_mle = stats.prefix_sums[out.tau_mle - 1] / out.tau_mle;
    out.l_mle = fn(out.theta_mle, out.tau_mle);
    const auto bayes = bayes_from_posterior(bayes_posterior(stats), fn);
    out.tau_bayes = bayes.tau;
    out.theta_bayes = bayes.theta;
    out.l_bayes = bayes.l;
    return out;
}

double log_likelihood(std::span<const double> x, double theta, int tau, double eps) {
    const int n = static_cast<int>(x.size());
    if (tau < 1 || tau > n) throw std::invalid_argument("log_likelihood: tau must lie in 1..n");
    require_eps(eps, "log_likelihood");
    CompensatedSum rss;
    for (int i = 0; i < n; ++i) {
        const double r = i < tau ? x[i] - theta : x[i];
        rss.add(r * r);
    }
    return -0.5 * n * std::log(2.0 * std::numbers::pi * eps * eps) - rss.value() / (2.0 * eps * eps);
}

}  // namespace chpt
