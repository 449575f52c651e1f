#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "chpt/asymptotic_risk.hpp"
#include "chpt/limiting_process.hpp"
#include "chpt/mc_harness.hpp"
#include "chpt/sequence_model.hpp"

namespace chpt {

/// Round-trip decimal with 17 significant digits ("nan" for NaN).
std::string format_real(double v);

inline constexpr const char* kRiskCsvHeader =
    "theta,tau,mse_tau_mle,se_tau_mle,mse_tau_bayes,se_tau_bayes,mse_l_mle,se_l_mle,mse_l_bayes,se_l_bayes,kappa,"
    "kappa_tilde";

void write_risk_csv(std::ostream& out, const RiskTable& table);
void write_sample_csv(std::ostream& out, const SequenceSample& sample);

class CsvParseError : public std::runtime_error {
public:
    CsvParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// One real per line; an optional first line "x" is a header. Blank lines are
/// skipped. Throws CsvParseError naming the 1-based line on a bad or
/// non-finite token.
std::vector<double> read_series_csv(std::istream& in);

enum class Figure { kappa, kappa_tilde };

/// Standalone SVG 1.1 (width 1200): one polyline per theta against tau, a
/// legend, and for the kappa panel a dashed reference line at the limiting
/// efficiency.
std::string risk_figure_svg(const RiskTable& table, Figure which);

nlohmann::json to_json(const MeanSe& v);
nlohmann::json to_json(const EstimateSet& est, const PosteriorSummary& post);
nlohmann::json to_json(const LimitConstants& c, const GridSpec& grid);
nlohmann::json to_json(const AsymptoticInputs& in, const RiskExpansion& r);
nlohmann::json to_json(const RiskTable& table);

}  // namespace chpt
