#include "chpt/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace chpt {

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_risk_csv(std::ostream& out, const RiskTable& table) {
    out << kRiskCsvHeader << '\n';
    for (const auto& c : table.cells) {
        out << format_real(c.theta) << ',' << c.tau << ',' << format_real(c.mse_tau_mle.mean) << ','
            << format_real(c.mse_tau_mle.se) << ',' << format_real(c.mse_tau_bayes.mean) << ','
            << format_real(c.mse_tau_bayes.se) << ',' << format_real(c.mse_l_mle.mean) << ','
            << format_real(c.mse_l_mle.se) << ',' << format_real(c.mse_l_bayes.mean) << ','
            << format_real(c.mse_l_bayes.se) << ',' << format_real(c.kappa) << ',' << format_real(c.kappa_tilde)
            << '\n';
    }
}

void write_sample_csv(std::ostream& out, const SequenceSample& sample) {
    out << "x\n";
    for (double v : sample.x) out << format_real(v) << '\n';
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<double> read_series_csv(std::istream& in) {
    std::vector<double> out;
    std::string line;
    std::size_t lineno = 0;
    bool seen_content = false;
    while (std::getline(in, line)) {
        ++lineno;
        const auto tok = trim(line);
        if (tok.empty()) continue;
        if (!seen_content) {
            seen_content = true;
            if (tok == "x") continue;
        }
        double v = 0.0;
        const auto [end, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || end != tok.data() + tok.size())
            throw CsvParseError(lineno, "not a real number: '" + std::string(tok) + "'");
        if (!std::isfinite(v)) throw CsvParseError(lineno, "non-finite value: '" + std::string(tok) + "'");
        out.push_back(v);
    }
    return out;
}

namespace {

constexpr double kWidth = 1200.0;
constexpr double kHeight = 700.0;
constexpr double kLeft = 90.0;
constexpr double kRight = 230.0;
constexpr double kTop = 60.0;
constexpr double kBottom = 70.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"};

std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

// Step from {1, 2, 5} x 10^k giving roughly `target` intervals.
double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) return m * mag;
    return 10.0 * mag;
}

}  // namespace

std::string risk_figure_svg(const RiskTable& table, Figure which) {
    const bool is_kappa = which == Figure::kappa;
    auto value_of = [&](const RiskCell& c) { return is_kappa ? c.kappa : c.kappa_tilde; };
    const double reference = is_kappa ? limit_efficiency() : 1.0;

    // Series keyed by theta, in config order.
    std::vector<double> thetas;
    std::map<double, std::vector<std::pair<int, double>>> series;
    for (const auto& c : table.cells) {
        if (!series.count(c.theta)) thetas.push_back(c.theta);
        series[c.theta].emplace_back(c.tau, value_of(c));
    }

    int tau_lo = 0, tau_hi = 1;
    double y_lo = std::min(0.0, reference), y_hi = reference;
    bool first = true;
    for (const auto& c : table.cells) {
        tau_lo = first ? c.tau : std::min(tau_lo, c.tau);
        tau_hi = first ? c.tau : std::max(tau_hi, c.tau);
        first = false;
        const double v = value_of(c);
        if (std::isfinite(v)) {
            y_lo = std::min(y_lo, v);
            y_hi = std::max(y_hi, v);
        }
    }
    if (tau_hi == tau_lo) ++tau_hi;
    const double ystep = nice_step(std::max(y_hi - y_lo, 1e-6), 8);
    y_lo = std::floor(y_lo / ystep) * ystep;
    y_hi = std::ceil(y_hi / ystep) * ystep;
    if (y_hi <= y_lo) y_hi = y_lo + ystep;

    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double tau) { return kLeft + (tau - tau_lo) / (tau_hi - tau_lo) * plot_w; };
    auto py = [&](double y) { return kTop + (y_hi - y) / (y_hi - y_lo) * plot_h; };

    std::ostringstream svg;
    svg << "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth << "\" height=\"" << kHeight
        << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" fill=\"white\"/>\n";

    const std::string title = is_kappa ? "Risk ratio kappa = E(tau_b - tau)^2 / E(tau_mle - tau)^2"
                                       : "Risk ratio kappa~ = E(L_b - L)^2 / E(L_mle - L)^2";
    svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"30\" font-family=\"sans-serif\" font-size=\"20\" "
        << "text-anchor=\"middle\">" << xml_escape(title) << " (n=" << table.config.n
        << ", eps=" << format_real(table.config.eps) << ", reps=" << table.config.reps << ")</text>\n";

    // Axes and grid.
    svg << "<g stroke=\"#cccccc\" stroke-width=\"1\">\n";
    for (int k = 0;; ++k) {
        const double y = y_lo + k * ystep;
        if (y > y_hi + 1e-9 * ystep) break;
        svg << "<line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(y)) << "\" x2=\"" << fixed(kLeft + plot_w)
            << "\" y2=\"" << fixed(py(y)) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<g font-family=\"sans-serif\" font-size=\"14\">\n";
    for (int k = 0;; ++k) {
        const double y = y_lo + k * ystep;
        if (y > y_hi + 1e-9 * ystep) break;
        svg << "<text x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(py(y) + 5) << "\" text-anchor=\"end\">"
            << fixed(y, ystep < 0.1 ? 2 : 1) << "</text>\n";
    }
    for (int t = tau_lo; t <= tau_hi; ++t) {
        svg << "<text x=\"" << fixed(px(t)) << "\" y=\"" << fixed(kTop + plot_h + 22)
            << "\" text-anchor=\"middle\">" << t << "</text>\n";
    }
    svg << "<text x=\"" << fixed(kLeft + plot_w / 2) << "\" y=\"" << fixed(kHeight - 20)
        << "\" text-anchor=\"middle\">tau</text>\n";
    svg << "<text x=\"25\" y=\"" << fixed(kTop + plot_h / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 25 "
        << fixed(kTop + plot_h / 2) << ")\">" << (is_kappa ? "kappa" : "kappa~") << "</text>\n";
    svg << "</g>\n";
    svg << "<rect x=\"" << fixed(kLeft) << "\" y=\"" << fixed(kTop) << "\" width=\"" << fixed(plot_w)
        << "\" height=\"" << fixed(plot_h) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>\n";

    // Reference line.
    svg << "<line class=\"reference\" x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(py(reference)) << "\" x2=\""
        << fixed(kLeft + plot_w) << "\" y2=\"" << fixed(py(reference))
        << "\" stroke=\"black\" stroke-width=\"1.5\" stroke-dasharray=\"8 5\"/>\n";
    svg << "<text x=\"" << fixed(kLeft + plot_w + 6) << "\" y=\"" << fixed(py(reference) + 5)
        << "\" font-family=\"sans-serif\" font-size=\"13\">"
        << (is_kappa ? "8zeta(3)/13 = " + fixed(reference, 4) : std::string("1")) << "</text>\n";

    // Series and legend.
    for (std::size_t s = 0; s < thetas.size(); ++s) {
        const char* color = kPalette[s % std::size(kPalette)];
        std::string points;
        std::string markers;
        for (const auto& [tau, v] : series[thetas[s]]) {
            if (!std::isfinite(v)) continue;
            if (!points.empty()) points += ' ';
            points += fixed(px(tau)) + "," + fixed(py(v));
            markers += "<circle cx=\"" + fixed(px(tau)) + "\" cy=\"" + fixed(py(v)) + "\" r=\"3.5\" fill=\"" + color +
                       "\"/>\n";
        }
        svg << "<polyline class=\"series\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\""
            << points << "\"/>\n"
            << markers;
        const double ly = kTop + 30.0 + 28.0 * s;
        const double lx = kLeft + plot_w + 60.0;
        svg << "<line x1=\"" << fixed(lx) << "\" y1=\"" << fixed(ly) << "\" x2=\"" << fixed(lx + 30) << "\" y2=\""
            << fixed(ly) << "\" stroke=\"" << color << "\" stroke-width=\"3\"/>\n"
            << "<text x=\"" << fixed(lx + 38) << "\" y=\"" << fixed(ly + 5)
            << "\" font-family=\"sans-serif\" font-size=\"14\">theta/eps = "
            << format_real(thetas[s] / table.config.eps) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

nlohmann::json to_json(const MeanSe& v) {
    nlohmann::json j;
    j["mean"] = v.mean;
    j["se"] = std::isfinite(v.se) ? nlohmann::json(v.se) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const EstimateSet& est, const PosteriorSummary& post) {
    return {{"tau_mle", est.tau_mle},     {"theta_mle", est.theta_mle},     {"l_mle", est.l_mle},
            {"tau_bayes", est.tau_bayes}, {"theta_bayes", est.theta_bayes}, {"l_bayes", est.l_bayes},
            {"weights", post.weights}};
}

nlohmann::json to_json(const LimitConstants& c, const GridSpec& grid) {
    return {{"delta", c.delta},
            {"grid_step", grid.step},
            {"truncation", grid.truncation},
            {"reps", c.reps},
            {"e_umle2", to_json(c.e_umle2)},
            {"e_ub2", to_json(c.e_ub2)},
            {"kappa0_hat", to_json(c.kappa0_hat)},
            {"mean_umle", to_json(c.mean_umle)},
            {"mean_ub", to_json(c.mean_ub)},
            {"tail_fraction", c.tail_fraction},
            {"targets",
             {{"e_umle2", limit_mle_second_moment(c.delta)},
              {"e_ub2", limit_bayes_second_moment(c.delta)},
              {"kappa0", limit_efficiency()}}}};
}

nlohmann::json to_json(const AsymptoticInputs& in, const RiskExpansion& r) {
    return {{"inputs",
             {{"eps", in.eps},
              {"i1", in.i1},
              {"i2", in.i2},
              {"delta", in.delta},
              {"dL_dtheta1", in.dL_dtheta1},
              {"dL_dtheta2", in.dL_dtheta2},
              {"dL_dtau", in.dL_dtau},
              {"d2L_dtheta1", in.d2L_dtheta1},
              {"d2L_dtheta2", in.d2L_dtheta2}}},
            {"first_order", r.first_order},
            {"second_order_mle", r.second_order_mle},
            {"second_order_bayes", r.second_order_bayes},
            {"ratio_limit", r.ratio_limit},
            {"risk_mle", r.mle_risk(in.eps)},
            {"risk_bayes", r.bayes_risk(in.eps)}};
}

nlohmann::json to_json(const RiskTable& table) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : table.cells) {
        cells.push_back({{"theta", c.theta},
                         {"tau", c.tau},
                         {"mse_tau_mle", to_json(c.mse_tau_mle)},
                         {"mse_tau_bayes", to_json(c.mse_tau_bayes)},
                         {"mse_l_mle", to_json(c.mse_l_mle)},
                         {"mse_l_bayes", to_json(c.mse_l_bayes)},
                         {"kappa", c.kappa},
                         {"kappa_tilde", c.kappa_tilde},
                         {"identifiable", c.theta != 0.0}});
    }
    const auto& cfg = table.config;
    return {{"config",
             {{"n", cfg.n},
              {"eps", cfg.eps},
              {"theta", cfg.theta_values},
              {"tau", cfg.tau_values},
              {"reps", cfg.reps},
              {"seed", cfg.seed},
              {"functional", cfg.functional_name}}},
            {"notes",
             {"tau_bayes is the unrounded posterior mean",
              "standard errors are batch means over min(100, reps) batches; null when fewer than 2"}},
            {"cells", cells}};
}

}  // namespace chpt
