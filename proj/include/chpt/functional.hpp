#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace chpt {

/// A smooth target L(theta, tau) of the signal. Implementations may also
/// provide E[L(Theta, tau)] for Theta ~ N(mean, var) in closed form, which the
/// Bayes estimator prefers over quadrature.
class Functional {
public:
    virtual ~Functional() = default;

    virtual std::string_view name() const = 0;
    virtual double operator()(double theta, int tau) const = 0;

    virtual bool has_exact_gaussian_mean() const { return false; }
    virtual std::optional<double> exact_gaussian_mean(double /*mean*/, double /*var*/, int /*tau*/) const {
        return std::nullopt;
    }
};

/// L(theta, tau) = theta * tau, the sum of the signal before the change.
class ThetaTimesTau final : public Functional {
public:
    std::string_view name() const override { return "theta_tau"; }
    double operator()(double theta, int tau) const override { return theta * tau; }
    bool has_exact_gaussian_mean() const override { return true; }
    std::optional<double> exact_gaussian_mean(double mean, double, int tau) const override { return mean * tau; }
};

class ThetaOnly final : public Functional {
public:
    std::string_view name() const override { return "theta"; }
    double operator()(double theta, int) const override { return theta; }
    bool has_exact_gaussian_mean() const override { return true; }
    std::optional<double> exact_gaussian_mean(double mean, double, int) const override { return mean; }
};

class TauOnly final : public Functional {
public:
    std::string_view name() const override { return "tau"; }
    double operator()(double, int tau) const override { return tau; }
    bool has_exact_gaussian_mean() const override { return true; }
    std::optional<double> exact_gaussian_mean(double, double, int tau) const override { return tau; }
};

/// L(theta, tau) = theta^2 * tau; E = (mean^2 + var) * tau.
class ThetaSquaredTimesTau final : public Functional {
public:
    std::string_view name() const override { return "theta2_tau"; }
    double operator()(double theta, int tau) const override { return theta * theta * tau; }
    bool has_exact_gaussian_mean() const override { return true; }
    std::optional<double> exact_gaussian_mean(double mean, double var, int tau) const override {
        return (mean * mean + var) * tau;
    }
};

/// Wraps an arbitrary callable; Gaussian means always go through quadrature.
class CallableFunctional final : public Functional {
public:
    CallableFunctional(std::string name, std::function<double(double, int)> fn)
        : name_(std::move(name)), fn_(std::move(fn)) {}
    std::string_view name() const override { return name_; }
    double operator()(double theta, int tau) const override { return fn_(theta, tau); }

private:
    std::string name_;
    std::function<double(double, int)> fn_;
};

/// Physicists' Gauss-Hermite rule: integral of exp(-x^2) f(x) ~ sum w_i f(x_i).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

inline constexpr int kDefaultHermiteNodes = 32;

GaussHermiteRule gauss_hermite_rule(int points);
const GaussHermiteRule& default_hermite_rule();

/// E[L(Theta, tau)] for Theta ~ N(mean, var) by Gauss-Hermite quadrature.
double gaussian_mean_quadrature(const Functional& fn, double mean, double var, int tau,
                                const GaussHermiteRule& rule = default_hermite_rule());

/// Closed form when the functional has one, quadrature otherwise.
double gaussian_mean(const Functional& fn, double mean, double var, int tau);

/// Built-in functionals by name: theta_tau, theta, tau, theta2_tau.
std::unique_ptr<Functional> make_functional(std::string_view name);
std::vector<std::string> functional_names();

}  // namespace chpt
