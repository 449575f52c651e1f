#include "chpt/functional.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace chpt {

// Newton iteration on the orthonormal Hermite recurrence, started from the
// usual asymptotic guesses for the largest roots.
GaussHermiteRule gauss_hermite_rule(int points) {
    if (points < 1) throw std::invalid_argument("gauss_hermite_rule: need at least one node");
    const int n = points;
    const double pi_m4 = std::pow(std::numbers::pi, -0.25);
    GaussHermiteRule rule;
    rule.nodes.assign(n, 0.0);
    rule.weights.assign(n, 0.0);
    double z = 0.0;
    for (int i = 0; i < (n + 1) / 2; ++i) {
        if (i == 0)
            z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
        else if (i == 1)
            z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
        else if (i == 2)
            z = 1.86 * z - 0.86 * rule.nodes[0];
        else if (i == 3)
            z = 1.91 * z - 0.91 * rule.nodes[1];
        else
            z = 2.0 * z - rule.nodes[i - 2];

        double deriv = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = pi_m4;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
            }
            deriv = std::sqrt(2.0 * n) * p2;
            const double prev = z;
            z = prev - p1 / deriv;
            if (std::abs(z - prev) <= 1e-15 * std::max(1.0, std::abs(z))) break;
        }
        rule.nodes[i] = z;
        rule.nodes[n - 1 - i] = -z;
        rule.weights[i] = rule.weights[n - 1 - i] = 2.0 / (deriv * deriv);
    }
    return rule;
}

const GaussHermiteRule& default_hermite_rule() {
    static const GaussHermiteRule rule = gauss_hermite_rule(kDefaultHermiteNodes);
    return rule;
}

double gaussian_mean_quadrature(const Functional& fn, double mean, double var, int tau,
                                const GaussHermiteRule& rule) {
    if (!(var >= 0.0)) throw std::invalid_argument("gaussian_mean_quadrature: variance must be >= 0");
    const double scale = std::sqrt(2.0 * var);
    double acc = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i)
        acc += rule.weights[i] * fn(mean + scale * rule.nodes[i], tau);
    return acc / std::sqrt(std::numbers::pi);
}

double gaussian_mean(const Functional& fn, double mean, double var, int tau) {
    if (fn.has_exact_gaussian_mean()) {
        if (auto v = fn.exact_gaussian_mean(mean, var, tau)) return *v;
    }
    return gaussian_mean_quadrature(fn, mean, var, tau);
}

std::unique_ptr<Functional> make_functional(std::string_view name) {
    if (name == "theta_tau") return std::make_unique<ThetaTimesTau>();
    if (name == "theta") return std::make_unique<ThetaOnly>();
    if (name == "tau") return std::make_unique<TauOnly>();
    if (name == "theta2_tau") return std::make_unique<ThetaSquaredTimesTau>();
    throw std::invalid_argument("unknown functional '" + std::string(name) + "'");
}

std::vector<std::string> functional_names() { return {"theta_tau", "theta", "tau", "theta2_tau"}; }

}  // namespace chpt
