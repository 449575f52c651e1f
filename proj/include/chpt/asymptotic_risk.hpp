#pragma once

namespace chpt {

/// Local quantities of a white-noise change-point model at the true
/// parameter: Fisher-type norms of the two regimes, the jump, and the
/// derivatives of the target functional.
struct AsymptoticInputs {
    double eps = 1.0;
    double i1 = 1.0;
    double i2 = 1.0;
    double delta = 1.0;
    double dL_dtheta1 = 0.0;
    double dL_dtheta2 = 0.0;
    double dL_dtau = 0.0;
    double d2L_dtheta1 = 0.0;
    double d2L_dtheta2 = 0.0;
};

/// Quadratic risks of both estimators expand as
///   R = first_order * eps^2 + second_order_{mle,bayes} * eps^4 + o(eps^4).
/// The eps^2 term is common to both estimators and stored once.
struct RiskExpansion {
    double first_order = 0.0;
    double second_order_mle = 0.0;
    double second_order_bayes = 0.0;
    // lim_{eps->0} R_bayes / R_mle: 1 when first_order > 0, otherwise the
    // ratio of second-order coefficients.
    double ratio_limit = 1.0;

    double mle_risk(double eps) const;
    double bayes_risk(double eps) const;
};

/// Throws std::invalid_argument for a zero jump, non-positive norms, or when
/// every derivative is zero (the ratio is then undefined).
RiskExpansion risk_expansion(const AsymptoticInputs& in);

/// Riemann zeta at 3, to about 1e-15.
double zeta3();

/// Limiting constants at jump size delta.
double limit_mle_second_moment(double delta);    // 26 / delta^4
double limit_bayes_second_moment(double delta);  // 16 zeta(3) / delta^4
double limit_efficiency();                       // 8 zeta(3) / 13

}  // namespace chpt
