#include "chpt/asymptotic_risk.hpp"

#include <cmath>
#include <stdexcept>

namespace chpt {

double zeta3() {
    // Partial sum to N-1 plus the Euler-Maclaurin tail
    //   sum_{k>=N} k^-3 = 1/(2N^2) + 1/(2N^3) + 1/(4N^4) - 1/(12N^6) + 1/(12N^8) - ...
    // whose first omitted term is O(N^-10).
    static const double value = [] {
        constexpr int N = 64;
        double s = 0.0;
        for (int k = N - 1; k >= 1; --k) {
            const double kd = k;
            s += 1.0 / (kd * kd * kd);
        }
        const double n = N;
        const double n2 = n * n;
        const double tail = 1.0 / (2.0 * n2) + 1.0 / (2.0 * n2 * n) + 1.0 / (4.0 * n2 * n2) -
                            1.0 / (12.0 * n2 * n2 * n2) + 1.0 / (12.0 * n2 * n2 * n2 * n2);
        return s + tail;
    }();
    return value;
}

double limit_mle_second_moment(double delta) { return 26.0 / std::pow(delta, 4); }
double limit_bayes_second_moment(double delta) { return 16.0 * zeta3() / std::pow(delta, 4); }
double limit_efficiency() { return 8.0 * zeta3() / 13.0; }

double RiskExpansion::mle_risk(double eps) const {
    const double e2 = eps * eps;
    return first_order * e2 + second_order_mle * e2 * e2;
}

double RiskExpansion::bayes_risk(double eps) const {
    const double e2 = eps * eps;
    return first_order * e2 + second_order_bayes * e2 * e2;
}

RiskExpansion risk_expansion(const AsymptoticInputs& in) {
    if (in.delta == 0.0 || !std::isfinite(in.delta)) throw std::invalid_argument("risk_expansion: jump size must be nonzero");
    if (!(in.i1 > 0.0) || !(in.i2 > 0.0)) throw std::invalid_argument("risk_expansion: i1 and i2 must be > 0");
    if (in.dL_dtheta1 == 0.0 && in.dL_dtheta2 == 0.0 && in.dL_dtau == 0.0 && in.d2L_dtheta1 == 0.0 &&
        in.d2L_dtheta2 == 0.0)
        throw std::invalid_argument("risk_expansion: all derivatives are zero, risk ratio undefined");

    const double tau_term = in.dL_dtau * in.dL_dtau;

    RiskExpansion out;
    out.first_order = std::pow(in.dL_dtheta1 / in.i1, 2) + std::pow(in.dL_dtheta2 / in.i2, 2);
    out.second_order_mle = limit_mle_second_moment(in.delta) * tau_term;
    out.second_order_bayes = limit_bayes_second_moment(in.delta) * tau_term;
    const double norms[2] = {in.i1, in.i2};
    const double curv[2] = {in.d2L_dtheta1, in.d2L_dtheta2};
    for (int i = 0; i < 2; ++i) {
        const double i2 = norms[i] * norms[i];
        const double i4 = i2 * i2;
        const double c2 = curv[i] * curv[i];
        out.second_order_mle += 3.0 / i4 * c2;
        out.second_order_bayes += (i4 + 2.0 * i2 + 3.0) / i4 * c2;
    }
    out.ratio_limit = out.first_order > 0.0 ? 1.0 : out.second_order_bayes / out.second_order_mle;
    return out;
}

}  // namespace chpt
