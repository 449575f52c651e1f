#include "chpt/limiting_process.hpp"

#include <cmath>
#include <stdexcept>

namespace chpt {

GridSpec GridSpec::make(double step, double truncation) {
    if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("GridSpec: step must be > 0");
    if (!(truncation > 0.0) || !std::isfinite(truncation))
        throw std::invalid_argument("GridSpec: truncation must be > 0");
    const double ratio = truncation / step;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw std::invalid_argument("GridSpec: truncation / step must be an integer");
    return GridSpec{step, truncation};
}

long GridSpec::half_points() const { return std::lround(truncation / step); }

void fill_brownian_path(const GridSpec& grid, RngStream rng, std::vector<double>& values) {
    const long half = grid.half_points();
    values.resize(static_cast<std::size_t>(2 * half + 1));
    const double sd = std::sqrt(grid.step);
    NormalSampler draw(rng);
    values[half] = 0.0;
    double b = 0.0;
    for (long j = 1; j <= half; ++j) {
        b += sd * draw();
        values[half + j] = b;
    }
    b = 0.0;
    for (long j = 1; j <= half; ++j) {
        b += sd * draw();
        values[half - j] = b;
    }
}

BrownianPath sample_brownian_path(const GridSpec& grid, RngStream rng) {
    BrownianPath path{grid, {}};
    fill_brownian_path(grid, rng, path.values);
    return path;
}

BrownianPath coarsen(const BrownianPath& path, long factor) {
    const long half = path.grid.half_points();
    if (factor < 1 || half % factor != 0)
        throw std::invalid_argument("coarsen: factor must divide the number of half-grid points");
    BrownianPath out{GridSpec{path.grid.step * factor, path.grid.truncation}, {}};
    const long coarse_half = half / factor;
    out.values.resize(static_cast<std::size_t>(2 * coarse_half + 1));
    for (long j = -coarse_half; j <= coarse_half; ++j) out.values[coarse_half + j] = path.values[half + j * factor];
    return out;
}

LimitDrawResult limit_estimates_on_path(std::span<const double> values, const GridSpec& grid, double delta) {
    if (!(delta > 0.0)) throw std::invalid_argument("limit estimates: delta must be > 0");
    const long half = grid.half_points();
    if (values.size() < 3 || static_cast<long>(values.size()) != 2 * half + 1)
        throw std::invalid_argument("limit estimates: degenerate grid (need at least 3 points)");

    // Log-likelihood at unit jump, g_j = B(u_j) - |u_j| / 2. Scanning outward
    // from 0 and alternating sides makes a strict '>' implement the tie rule
    // (smallest |u| first, then the negative side).
    auto g_at = [&](long j) { return values[half + j] - 0.5 * std::abs(grid.coordinate(half + j)); };
    long best = 0;
    double g_star = g_at(0);
    for (long j = 1; j <= half; ++j) {
        const double gn = g_at(-j);
        if (gn > g_star) {
            g_star = gn;
            best = -j;
        }
        const double gp = g_at(j);
        if (gp > g_star) {
            g_star = gp;
            best = j;
        }
    }

    CompensatedSum num;
    CompensatedSum den;
    for (long j = -half; j <= half; ++j) {
        const double w = std::exp(g_at(j) - g_star);
        num.add(grid.coordinate(half + j) * w);
        den.add(w);
    }

    const double scale = delta * delta;
    return LimitDrawResult{grid.coordinate(half + best) / scale, num.value() / den.value() / scale, delta};
}

LimitDrawResult limit_estimates_on_path(const BrownianPath& path, double delta) {
    return limit_estimates_on_path(path.values, path.grid, delta);
}

LimitDrawResult draw_limit_estimates(double delta, const GridSpec& grid, RngStream rng) {
    if (grid.points() < 3) throw std::invalid_argument("draw_limit_estimates: degenerate grid");
    return limit_estimates_on_path(sample_brownian_path(grid, rng), delta);
}

std::vector<LimitDrawResult> simulate_limit_draws(double delta, const GridSpec& grid, std::size_t reps,
                                                  std::uint64_t seed, unsigned workers) {
    if (!(delta > 0.0)) throw std::invalid_argument("simulate_limit_draws: delta must be > 0");
    if (grid.points() < 3) throw std::invalid_argument("simulate_limit_draws: degenerate grid");
    std::vector<LimitDrawResult> out(reps);
    parallel_for(reps, workers, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> path;
        for (std::size_t r = lo; r < hi; ++r) {
            fill_brownian_path(grid, RngStream{seed, r}, path);
            out[r] = limit_estimates_on_path(path, grid, delta);
        }
    });
    return out;
}

LimitConstants summarize_limit_draws(std::span<const LimitDrawResult> draws, const GridSpec& grid) {
    LimitConstants out;
    out.reps = draws.size();
    if (draws.empty()) return out;
    out.delta = draws.front().delta;
    const double d2 = out.delta * out.delta;
    std::vector<double> mle(draws.size()), bayes(draws.size()), mle2(draws.size()), bayes2(draws.size());
    std::size_t tail = 0;
    for (std::size_t r = 0; r < draws.size(); ++r) {
        mle[r] = draws[r].u_mle;
        bayes[r] = draws[r].u_bayes;
        mle2[r] = mle[r] * mle[r];
        bayes2[r] = bayes[r] * bayes[r];
        if (std::abs(mle[r] * d2) > 0.5 * grid.truncation) ++tail;
    }
    out.e_umle2 = mean_with_batch_se(mle2);
    out.e_ub2 = mean_with_batch_se(bayes2);
    out.kappa0_hat = ratio_with_batch_se(bayes2, mle2);
    out.mean_umle = mean_with_batch_se(mle);
    out.mean_ub = mean_with_batch_se(bayes);
    out.tail_fraction = static_cast<double>(tail) / static_cast<double>(draws.size());
    return out;
}

LimitConstants estimate_limit_constants(double delta, const GridSpec& grid, std::size_t reps,
                                        std::uint64_t seed, unsigned workers) {
    if (reps < 100) throw std::invalid_argument("estimate_limit_constants: reps must be >= 100");
    const auto draws = simulate_limit_draws(delta, grid, reps, seed, workers);
    return summarize_limit_draws(draws, grid);
}

LimitGaussPart draw_limit_gauss_part(double i1, double i2, RngStream rng) {
    if (!(i1 > 0.0) || !(i2 > 0.0)) throw std::invalid_argument("draw_limit_gauss_part: i1, i2 must be > 0");
    NormalSampler draw(rng);
    LimitGaussPart out;
    out.i1 = i1;
    out.i2 = i2;
    out.z1 = draw();
    out.z2 = draw();
    out.h1_hat = out.z1 / i1;
    out.h2_hat = out.z2 / i2;
    return out;
}

}  // namespace chpt
