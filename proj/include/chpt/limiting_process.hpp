#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "chpt/core.hpp"
#include "chpt/rng.hpp"

namespace chpt {

/// Symmetric grid u_j = j * step, j = -m..m, with m = truncation / step.
struct GridSpec {
    double step = 0.01;
    double truncation = 200.0;

    /// Throws std::invalid_argument unless step, truncation > 0 and
    /// truncation / step is (numerically) an integer.
    static GridSpec make(double step, double truncation);

    long half_points() const;
    long points() const { return 2 * half_points() + 1; }
    double coordinate(long index) const { return static_cast<double>(index - half_points()) * step; }
};

/// Two-sided Brownian motion sampled on a GridSpec; values[half_points()] is
/// B(0) = 0.
struct BrownianPath {
    GridSpec grid;
    std::vector<double> values;
};

/// The limiting MLE and generalized Bayes estimates of the local change-point
/// parameter for jump size delta.
struct LimitDrawResult {
    double u_mle = 0.0;
    double u_bayes = 0.0;
    double delta = 1.0;
};

/// The Gaussian part of the limiting log-likelihood in the local theta
/// parameters; both the maximizer and the posterior mean equal z_i / i_i.
struct LimitGaussPart {
    double i1 = 1.0;
    double i2 = 1.0;
    double z1 = 0.0;
    double z2 = 0.0;
    double h1_hat = 0.0;
    double h2_hat = 0.0;
};

BrownianPath sample_brownian_path(const GridSpec& grid, RngStream rng);

/// Fills `values` (resized to grid.points()) with a path. The positive branch
/// consumes the first half_points() normals of the stream, the negative branch
/// the next half_points().
void fill_brownian_path(const GridSpec& grid, RngStream rng, std::vector<double>& values);

/// Every `factor`-th grid point counted outward from 0; the result is a path
/// on the grid with step * factor.
BrownianPath coarsen(const BrownianPath& path, long factor);

/// Estimates on a given path. With g(u) = B(u) - |u|/2 at unit jump:
///   u_mle   = argmax g, ties to the smallest |u| and then the negative side,
///   u_bayes = sum u e^{g - g*} / sum e^{g - g*},
/// both divided by delta^2.
LimitDrawResult limit_estimates_on_path(std::span<const double> values, const GridSpec& grid, double delta);
LimitDrawResult limit_estimates_on_path(const BrownianPath& path, double delta);

LimitDrawResult draw_limit_estimates(double delta, const GridSpec& grid, RngStream rng);

/// Replication r uses stream (seed, r); results are in replication order and
/// independent of `workers`.
std::vector<LimitDrawResult> simulate_limit_draws(double delta, const GridSpec& grid, std::size_t reps,
                                                  std::uint64_t seed, unsigned workers = 0);

struct LimitConstants {
    MeanSe e_umle2;
    MeanSe e_ub2;
    MeanSe kappa0_hat;
    MeanSe mean_umle;
    MeanSe mean_ub;
    // Fraction of draws whose argmax, in unit-jump coordinates, lies beyond
    // half the truncation.
    double tail_fraction = 0.0;
    std::size_t reps = 0;
    double delta = 1.0;
};

LimitConstants summarize_limit_draws(std::span<const LimitDrawResult> draws, const GridSpec& grid);

/// Paired Monte Carlo estimates of E u_mle^2, E u_b^2 and their ratio over
/// shared paths, with 100-batch standard errors. Requires reps >= 100.
LimitConstants estimate_limit_constants(double delta, const GridSpec& grid, std::size_t reps,
                                        std::uint64_t seed, unsigned workers = 0);

LimitGaussPart draw_limit_gauss_part(double i1, double i2, RngStream rng);

}  // namespace chpt
