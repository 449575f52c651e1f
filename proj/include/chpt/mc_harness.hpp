#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chpt/core.hpp"
#include "chpt/functional.hpp"

namespace chpt {

struct StudyConfig {
    int n = 20;
    double eps = 1.0;
    std::vector<double> theta_values;
    std::vector<int> tau_values;
    std::size_t reps = 10000;
    std::uint64_t seed = 0;
    std::string functional_name = "theta_tau";
    unsigned workers = 0;

    void validate() const;
};

/// The published study grid: n = 20, eps = 1, theta in {0.5, 1, 1.5, 2},
/// tau = 3..18, 10^4 replications.
StudyConfig figure1_config(std::uint64_t seed, std::size_t reps = 10000);

/// Empirical quadratic risks of both estimator families at one (theta, tau).
/// kappa = mse_tau_bayes / mse_tau_mle, kappa_tilde = mse_l_bayes / mse_l_mle.
struct RiskCell {
    double theta = 0.0;
    int tau = 1;
    MeanSe mse_tau_mle;
    MeanSe mse_tau_bayes;
    MeanSe mse_l_mle;
    MeanSe mse_l_bayes;
    double kappa = 0.0;
    double kappa_tilde = 0.0;
};

struct RiskTable {
    StudyConfig config;
    std::vector<RiskCell> cells;  // theta-major, in config order
};

/// Stream id of replication r in cell (theta, tau); depends only on these
/// three values so a cell's draws do not change with the surrounding grid.
std::uint64_t replication_stream_id(double theta, int tau, std::uint64_t replication);

/// Squared errors of the four estimators for every replication of one cell,
/// in replication order.
struct CellErrors {
    std::vector<double> tau_mle;
    std::vector<double> tau_bayes;
    std::vector<double> l_mle;
    std::vector<double> l_bayes;
};

CellErrors simulate_cell_errors(double theta, int tau, double eps, int n, std::size_t reps, std::uint64_t seed,
                                const Functional& fn, unsigned workers = 0);

RiskCell summarize_cell(double theta, int tau, const CellErrors& errors);

RiskCell run_cell(double theta, int tau, double eps, int n, std::size_t reps, std::uint64_t seed,
                  const Functional& fn, unsigned workers = 0);

RiskTable run_study(const StudyConfig& config);

}  // namespace chpt
