// Acceptance suite. Prints one PASS/FAIL line per criterion followed by
// indented detail, and exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "chpt/asymptotic_risk.hpp"
#include "chpt/cli.hpp"
#include "chpt/limiting_process.hpp"
#include "chpt/mc_harness.hpp"
#include "chpt/rng.hpp"
#include "chpt/sequence_model.hpp"

using namespace chpt;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 12345;

class Criterion {
public:
    explicit Criterion(std::string name) : name_(std::move(name)), start_(std::chrono::steady_clock::now()) {}

    bool check(bool ok, const std::string& what) {
        detail_ += std::string("    [") + (ok ? "ok" : "FAIL") + "] " + what + "\n";
        ok_ = ok_ && ok;
        return ok;
    }
    void note(const std::string& what) { detail_ += "    " + what + "\n"; }

    bool finish() const {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        char t[32];
        std::snprintf(t, sizeof t, " (%.1fs)", secs);
        std::cout << (ok_ ? "PASS " : "FAIL ") << name_ << t << "\n" << detail_ << std::flush;
        return ok_;
    }

private:
    std::string name_;
    std::chrono::steady_clock::time_point start_;
    std::string detail_;
    bool ok_ = true;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// ---------------------------------------------------------------------------
// Limiting process: one pass over 2e5 paths at step 0.01, with the same paths
// coarsened to steps 0.02 and 0.04 for the discretization check.

struct LimitRun {
    GridSpec grid;
    std::vector<LimitDrawResult> fine;
    std::vector<LimitDrawResult> step2;
    std::vector<LimitDrawResult> step4;
};

LimitRun run_limit_paths(std::size_t reps) {
    LimitRun run;
    run.grid = GridSpec::make(0.01, 200.0);
    const GridSpec g2 = GridSpec::make(0.02, 200.0);
    const GridSpec g4 = GridSpec::make(0.04, 200.0);
    run.fine.resize(reps);
    run.step2.resize(reps);
    run.step4.resize(reps);
    const long half = run.grid.half_points();
    parallel_for(reps, 0, [&](std::size_t lo, std::size_t hi) {
        std::vector<double> path, c2(static_cast<std::size_t>(g2.points())), c4(static_cast<std::size_t>(g4.points()));
        for (std::size_t r = lo; r < hi; ++r) {
            fill_brownian_path(run.grid, RngStream{kSeed, r}, path);
            run.fine[r] = limit_estimates_on_path(path, run.grid, 1.0);
            for (long j = -half / 2; j <= half / 2; ++j) c2[half / 2 + j] = path[half + 2 * j];
            for (long j = -half / 4; j <= half / 4; ++j) c4[half / 4 + j] = path[half + 4 * j];
            run.step2[r] = limit_estimates_on_path(c2, g2, 1.0);
            run.step4[r] = limit_estimates_on_path(c4, g4, 1.0);
        }
    });
    return run;
}

MeanSe second_moment(const std::vector<LimitDrawResult>& d) {
    std::vector<double> v(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) v[i] = d[i].u_mle * d[i].u_mle;
    return mean_with_batch_se(v);
}

bool criteria_1_to_3(const LimitRun& run) {
    const auto c = summarize_limit_draws(run.fine, run.grid);
    bool all = true;

    {
        Criterion k("C1 limiting MLE constant E u_mle^2 in [25, 27] (delta=1, T=200, step=0.01, 2e5 paths)");
        k.check(c.e_umle2.mean >= 25.0 && c.e_umle2.mean <= 27.0,
                fmt("E u_mle^2 = %.4f +- %.4f (target 26)", c.e_umle2.mean, c.e_umle2.se));
        all &= k.finish();
    }
    {
        Criterion k("C2 limiting Bayes constant E u_b^2 in [18.4, 20.0] (same run)");
        k.check(c.e_ub2.mean >= 18.4 && c.e_ub2.mean <= 20.0,
                fmt("E u_b^2 = %.4f +- %.4f (target 16 zeta(3) = %.4f)", c.e_ub2.mean, c.e_ub2.se,
                    limit_bayes_second_moment(1.0)));
        all &= k.finish();
    }
    {
        Criterion k("C3 relative efficiency kappa0 in [0.71, 0.77] with SE <= 0.01 (same paired run)");
        k.check(c.kappa0_hat.mean >= 0.71 && c.kappa0_hat.mean <= 0.77,
                fmt("kappa0_hat = %.5f (target 8 zeta(3)/13 = %.5f)", c.kappa0_hat.mean, limit_efficiency()));
        k.check(c.kappa0_hat.se <= 0.01, fmt("SE(kappa0_hat) = %.5f", c.kappa0_hat.se));
        all &= k.finish();
    }
    {
        Criterion k("limiting process properties (symmetry, truncation, discretization)");
        k.check(std::abs(c.mean_umle.mean) <= 3.0 * c.mean_umle.se,
                fmt("E u_mle = %.4f, 3 SE = %.4f", c.mean_umle.mean, 3.0 * c.mean_umle.se));
        k.check(std::abs(c.mean_ub.mean) <= 3.0 * c.mean_ub.se,
                fmt("E u_b = %.4f, 3 SE = %.4f", c.mean_ub.mean, 3.0 * c.mean_ub.se));
        k.check(c.tail_fraction < 1e-4, fmt("fraction of |argmax| > T/2 = %.3g", c.tail_fraction));
        const auto e4 = second_moment(run.step4);
        const auto e2 = second_moment(run.step2);
        const auto e1 = c.e_umle2;
        k.note(fmt("E u_mle^2 at step 0.04 / 0.02 / 0.01 = %.4f / %.4f / %.4f", e4.mean, e2.mean, e1.mean));
        k.check(std::abs(e2.mean - 26.0) <= std::abs(e4.mean - 26.0) + 3.0 * e2.se,
                fmt("|e(0.02) - 26| = %.4f <= |e(0.04) - 26| + 3 SE = %.4f", std::abs(e2.mean - 26.0),
                    std::abs(e4.mean - 26.0) + 3.0 * e2.se));
        k.check(std::abs(e1.mean - 26.0) <= std::abs(e2.mean - 26.0) + 3.0 * e1.se,
                fmt("|e(0.01) - 26| = %.4f <= |e(0.02) - 26| + 3 SE = %.4f", std::abs(e1.mean - 26.0),
                    std::abs(e2.mean - 26.0) + 3.0 * e1.se));

        // The pass above must be the library simulation, draw for draw.
        const std::size_t sub = std::min<std::size_t>(200, run.fine.size());
        const auto lib = simulate_limit_draws(1.0, run.grid, sub, kSeed, 0);
        bool same = true;
        for (std::size_t i = 0; i < sub; ++i)
            same = same && lib[i].u_mle == run.fine[i].u_mle && lib[i].u_bayes == run.fine[i].u_bayes;
        k.check(same, fmt("first %zu draws identical to simulate_limit_draws", sub));
        all &= k.finish();
    }
    return all;
}

// ---------------------------------------------------------------------------

bool criterion_4() {
    Criterion k("C4 risk-ratio study, 1e4 reps, n=20, eps=1: properties (a)-(e)");
    const auto table = run_study(figure1_config(kSeed, 10000));
    const auto fn = make_functional("theta_tau");

    auto kappa_se = [&](const RiskCell& c) {
        const auto e = simulate_cell_errors(c.theta, c.tau, 1.0, 20, 10000, kSeed, *fn);
        return ratio_with_batch_se(e.tau_bayes, e.tau_mle).se;
    };
    auto kappa_tilde_se = [&](const RiskCell& c) {
        const auto e = simulate_cell_errors(c.theta, c.tau, 1.0, 20, 10000, kSeed, *fn);
        return ratio_with_batch_se(e.l_bayes, e.l_mle).se;
    };

    struct Rule {
        const char* label;
        double theta;
        bool use_tilde;
        int tau_lo, tau_hi;
        double lo, hi;  // closed bounds, except (d) which is strict below
        bool strict_lower, strict_upper;
    };
    const Rule rules[] = {
        {"(a) theta=2: kappa in [0.68, 0.82] for tau 3..18", 2.0, false, 3, 18, 0.68, 0.82, false, false},
        {"(b) theta=1.5: kappa in [0.50, 0.87] for tau 3..18", 1.5, false, 3, 18, 0.50, 0.87, false, false},
        {"(c) theta=0.5: kappa~ <= 0.80 for tau <= 8", 0.5, true, 3, 8, -INFINITY, 0.80, false, false},
        {"(d) theta=1: kappa~ > 1 for tau >= 15", 1.0, true, 15, 18, 1.0, INFINITY, true, false},
        {"(e1) theta=0.5: kappa < 1 for tau 3..18", 0.5, false, 3, 18, -INFINITY, 1.0, false, true},
        {"(e2) theta=1: kappa < 1 for tau 3..18", 1.0, false, 3, 18, -INFINITY, 1.0, false, true},
    };
    for (const auto& rule : rules) {
        bool ok = true;
        double vmin = INFINITY, vmax = -INFINITY;
        std::string bad;
        for (const auto& c : table.cells) {
            if (c.theta != rule.theta || c.tau < rule.tau_lo || c.tau > rule.tau_hi) continue;
            const double v = rule.use_tilde ? c.kappa_tilde : c.kappa;
            vmin = std::min(vmin, v);
            vmax = std::max(vmax, v);
            const bool in = (rule.strict_lower ? v > rule.lo : v >= rule.lo) &&
                            (rule.strict_upper ? v < rule.hi : v <= rule.hi);
            if (!in) {
                ok = false;
                bad += fmt(" tau=%d: %.4f +- %.4f;", c.tau, v, rule.use_tilde ? kappa_tilde_se(c) : kappa_se(c));
            }
        }
        k.check(ok, fmt("%s: range [%.4f, %.4f]%s%s", rule.label, vmin, vmax, bad.empty() ? "" : "; outside:",
                        bad.c_str()));
    }
    return k.finish();
}

// ---------------------------------------------------------------------------

double zeta3_oracle() {
    // Partial sum to N plus the integral tail 1/(2N^2); the remaining error is
    // below 1/(2N^3).
    constexpr long N = 1'000'000;
    double s = 0.0;
    for (long k = N; k >= 1; --k) {
        const double kd = static_cast<double>(k);
        s += 1.0 / (kd * kd * kd);
    }
    return s + 1.0 / (2.0 * static_cast<double>(N) * static_cast<double>(N));
}

bool criterion_5() {
    Criterion k("C5 exact formulas: pure-tau ratio, shared first-order term, zeta(3)");
    const double z = zeta3_oracle();
    k.check(std::abs(zeta3() - z) <= 1e-12, fmt("zeta3() = %.16f, series oracle = %.16f", zeta3(), z));

    AsymptoticInputs in;
    in.dL_dtau = 1.0;
    double worst = 0.0;
    for (double delta : {0.25, 0.5, 1.0, 2.0, -3.0}) {
        in.delta = delta;
        worst = std::max(worst, std::abs(risk_expansion(in).ratio_limit - 8.0 * z / 13.0));
    }
    k.check(worst <= 1e-12, fmt("max |ratio_limit - 8 zeta(3)/13| over 5 jump sizes = %.3g", worst));

    // With a nonzero eps^2 term and eps^4 below one ulp of it, both risks must
    // be the identical number.
    NormalSampler draw(RngStream{kSeed, 5});
    bool same = true;
    int cases = 0;
    for (int t = 0; t < 1000; ++t) {
        AsymptoticInputs a;
        a.i1 = 0.5 + std::abs(draw());
        a.i2 = 0.5 + std::abs(draw());
        a.delta = 0.5 + std::abs(draw());
        a.dL_dtheta1 = 1.0 + std::abs(draw());
        a.dL_dtheta2 = draw();
        a.dL_dtau = draw();
        a.d2L_dtheta1 = draw();
        a.d2L_dtheta2 = draw();
        const auto r = risk_expansion(a);
        same = same && r.mle_risk(1e-12) == r.bayes_risk(1e-12) && r.ratio_limit == 1.0;
        ++cases;
    }
    k.check(same, fmt("first-order term shared by MLE and Bayes risks in %d random cases", cases));
    return k.finish();
}

// ---------------------------------------------------------------------------

bool criterion_6() {
    Criterion k("C6 property suites");
    const ThetaTimesTau fn;
    NormalSampler draw(RngStream{kSeed, 6});

    double worst_norm = 0.0, worst_scale = 0.0, worst_quad = 0.0;
    bool flip_exact = true;
    const double c = 2.75;
    for (std::uint64_t r = 0; r < 1000; ++r) {
        const double theta = 3.0 * draw();
        const int n = 20;
        const int tau = 1 + static_cast<int>(r % n);
        const double eps = 0.1 + std::abs(draw());
        const auto s = generate_sequence(ModelParams{theta, tau, eps, n}, RngStream{kSeed, 1000 + r});

        const auto post = bayes_posterior(cumulative_stats(s.x, eps));
        CompensatedSum total;
        for (double w : post.weights) total.add(w);
        worst_norm = std::max(worst_norm, std::abs(total.value() - 1.0));

        std::vector<double> neg(s.x.size()), scaled(s.x.size());
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            neg[i] = -s.x[i];
            scaled[i] = c * s.x[i];
        }
        const auto e = estimate_all(s.x, eps, fn);
        const auto en = estimate_all(neg, eps, fn);
        const auto pn = bayes_posterior(cumulative_stats(neg, eps));
        flip_exact = flip_exact && en.tau_mle == e.tau_mle && en.tau_bayes == e.tau_bayes &&
                     pn.weights == post.weights && en.theta_mle == -e.theta_mle &&
                     en.theta_bayes == -e.theta_bayes && en.l_mle == -e.l_mle && en.l_bayes == -e.l_bayes;

        const auto es = estimate_all(scaled, c * eps, fn);
        const auto ps = bayes_posterior(cumulative_stats(scaled, c * eps));
        auto rel = [](double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); };
        double d = 0.0;
        if (es.tau_mle != e.tau_mle) d = INFINITY;
        d = std::max(d, std::abs(es.tau_bayes - e.tau_bayes));
        for (std::size_t i = 0; i < post.weights.size(); ++i) d = std::max(d, std::abs(ps.weights[i] - post.weights[i]));
        d = std::max({d, rel(es.theta_mle, c * e.theta_mle), rel(es.theta_bayes, c * e.theta_bayes),
                      rel(es.l_mle, c * e.l_mle), rel(es.l_bayes, c * e.l_bayes)});
        worst_scale = std::max(worst_scale, d);

        const double closed = bayes_functional(post, fn);
        const double quad = bayes_functional_quadrature(post, fn);
        worst_quad = std::max(worst_quad, std::abs(closed - quad) / std::max(std::abs(closed), 1e-300));
    }
    k.check(worst_norm <= 1e-12, fmt("max |sum p_k - 1| over 1000 samples = %.3g", worst_norm));
    k.check(flip_exact, "sign flip: tau estimates and weights unchanged, theta and L estimates negated, exactly");
    k.check(worst_scale <= 1e-12, fmt("joint scale c=2.75: max deviation = %.3g", worst_scale));
    k.check(worst_quad <= 1e-10, fmt("closed-form vs quadrature Bayes L: max relative gap = %.3g", worst_quad));

    const auto grid = GridSpec::make(0.01, 50.0);
    bool scaling = true;
    for (std::uint64_t r = 0; r < 200; ++r) {
        const auto p = sample_brownian_path(grid, RngStream{kSeed, 7000 + r});
        const auto a = limit_estimates_on_path(p, 1.0);
        for (double delta : {0.5, 2.0, 4.0}) {
            const auto b = limit_estimates_on_path(p, delta);
            scaling = scaling && b.u_mle == a.u_mle / (delta * delta) && b.u_bayes == a.u_bayes / (delta * delta);
        }
    }
    k.check(scaling, "jump-size scaling exact on 200 shared paths for delta in {0.5, 2, 4}");

    int misses = 0, total = 0;
    for (double theta : {0.5, 1.0, 2.0})
        for (int tau : {1, 7, 19}) {
            const ModelParams p{theta, tau, theta / 20.0, 20};
            for (std::uint64_t r = 0; r < 1000; ++r) {
                const auto s = generate_sequence(p, RngStream{kSeed, replication_stream_id(theta, tau, r)});
                misses += mle_tau(cumulative_stats(s.x, p.eps)) != tau;
                ++total;
            }
        }
    k.check(misses == 0, fmt("eps = theta/20: %d tau_mle misses in %d replications", misses, total));
    return k.finish();
}

// ---------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

bool criterion_7() {
    Criterion k("C7 determinism: reproduce-figure1 CSV byte-identical across runs and worker counts");
    const fs::path root = fs::temp_directory_path() / ("chpt_acceptance_" + std::to_string(::getpid()));
    std::vector<std::string> csvs;
    for (const char* workers : {"1", "4", "1"}) {
        const auto dir = root / (std::string("w") + workers + "_" + std::to_string(csvs.size()));
        std::ostringstream out, err;
        const int code = cli::run({"reproduce-figure1", "--seed", std::to_string(kSeed), "--workers", workers,
                                   "--out", dir.string()},
                                  out, err);
        k.check(code == 0, fmt("run with %s worker(s) exit code %d", workers, code));
        csvs.push_back(slurp(dir / "risk_table.csv"));
    }
    fs::remove_all(root);
    k.check(!csvs[0].empty() && std::count(csvs[0].begin(), csvs[0].end(), '\n') == 65, "CSV has header + 64 rows");
    k.check(csvs[0] == csvs[1] && csvs[0] == csvs[2], "three runs (1, 4, 1 workers) byte-identical");
    return k.finish();
}

}  // namespace

int main(int argc, char** argv) {
    std::size_t limit_reps = 200000;
    if (argc > 1) limit_reps = std::stoul(argv[1]);
    if (limit_reps != 200000) std::cout << "note: limiting-process reps overridden to " << limit_reps << "\n";

    bool ok = true;
    ok &= criterion_5();
    ok &= criterion_6();
    ok &= criterion_7();
    ok &= criterion_4();
    ok &= criteria_1_to_3(run_limit_paths(limit_reps));
    std::cout << (ok ? "ACCEPTANCE: all criteria pass\n" : "ACCEPTANCE: some criteria FAIL\n");
    return ok ? 0 : 1;
}
