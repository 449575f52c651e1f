#include "chpt/mc_harness.hpp"

#include <bit>
#include <stdexcept>

#include "chpt/rng.hpp"
#include "chpt/sequence_model.hpp"

namespace chpt {

void StudyConfig::validate() const {
    if (n < 2) throw std::invalid_argument("study: n must be >= 2");
    if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("study: eps must be > 0");
    if (reps < 1) throw std::invalid_argument("study: reps must be >= 1");
    if (theta_values.empty()) throw std::invalid_argument("study: no theta values");
    if (tau_values.empty()) throw std::invalid_argument("study: no tau values");
    for (double t : theta_values)
        if (!std::isfinite(t)) throw std::invalid_argument("study: theta values must be finite");
    for (int t : tau_values)
        if (t < 1 || t > n) throw std::invalid_argument("study: every tau must lie in 1..n");
    make_functional(functional_name);
}

StudyConfig figure1_config(std::uint64_t seed, std::size_t reps) {
    StudyConfig c;
    c.n = 20;
    c.eps = 1.0;
    c.theta_values = {0.5, 1.0, 1.5, 2.0};
    for (int t = 3; t <= 18; ++t) c.tau_values.push_back(t);
    c.reps = reps;
    c.seed = seed;
    return c;
}

std::uint64_t replication_stream_id(double theta, int tau, std::uint64_t replication) {
    std::uint64_t h = mix64(std::bit_cast<std::uint64_t>(theta));
    h = mix64(h ^ static_cast<std::uint64_t>(static_cast<std::uint32_t>(tau)));
    return mix64(h ^ replication);
}

CellErrors simulate_cell_errors(double theta, int tau, double eps, int n, std::size_t reps, std::uint64_t seed,
                                const Functional& fn, unsigned workers) {
    const ModelParams params{theta, tau, eps, n};
    params.validate();
    if (!(eps > 0.0)) throw std::invalid_argument("run_cell: eps must be > 0");
    const double true_l = fn(theta, tau);
    CellErrors err;
    err.tau_mle.resize(reps);
    err.tau_bayes.resize(reps);
    err.l_mle.resize(reps);
    err.l_bayes.resize(reps);
    parallel_for(reps, workers, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t r = lo; r < hi; ++r) {
            const auto sample = generate_sequence(params, RngStream{seed, replication_stream_id(theta, tau, r)});
            const auto est = estimate_all(sample.x, eps, fn);
            const double dt_mle = est.tau_mle - tau;
            const double dt_bayes = est.tau_bayes - tau;
            const double dl_mle = est.l_mle - true_l;
            const double dl_bayes = est.l_bayes - true_l;
            err.tau_mle[r] = dt_mle * dt_mle;
            err.tau_bayes[r] = dt_bayes * dt_bayes;
            err.l_mle[r] = dl_mle * dl_mle;
            err.l_bayes[r] = dl_bayes * dl_bayes;
        }
    });
    return err;
}

RiskCell summarize_cell(double theta, int tau, const CellErrors& errors) {
    RiskCell cell;
    cell.theta = theta;
    cell.tau = tau;
    cell.mse_tau_mle = mean_with_batch_se(errors.tau_mle);
    cell.mse_tau_bayes = mean_with_batch_se(errors.tau_bayes);
    cell.mse_l_mle = mean_with_batch_se(errors.l_mle);
    cell.mse_l_bayes = mean_with_batch_se(errors.l_bayes);
    cell.kappa = cell.mse_tau_bayes.mean / cell.mse_tau_mle.mean;
    cell.kappa_tilde = cell.mse_l_bayes.mean / cell.mse_l_mle.mean;
    return cell;
}

RiskCell run_cell(double theta, int tau, double eps, int n, std::size_t reps, std::uint64_t seed,
                  const Functional& fn, unsigned workers) {
    return summarize_cell(theta, tau, simulate_cell_errors(theta, tau, eps, n, reps, seed, fn, workers));
}

RiskTable run_study(const StudyConfig& config) {
    config.validate();
    const auto fn = make_functional(config.functional_name);
    RiskTable table;
    table.config = config;
    table.cells.reserve(config.theta_values.size() * config.tau_values.size());
    for (double theta : config.theta_values)
        for (int tau : config.tau_values)
            table.cells.push_back(run_cell(theta, tau, config.eps, config.n, config.reps, config.seed, *fn, config.workers));
    return table;
}

}  // namespace chpt
