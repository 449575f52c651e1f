#include "chpt/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "chpt/asymptotic_risk.hpp"
#include "chpt/limiting_process.hpp"
#include "chpt/mc_harness.hpp"
#include "chpt/report.hpp"
#include "chpt/sequence_model.hpp"

namespace chpt::cli {

namespace {

constexpr std::uint64_t kDefaultSeed = 12345;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("failed writing '" + path + "'");
}

// An empty path means the output stream.
void emit(const std::string& path, const std::string& content, std::ostream& out) {
    if (path.empty()) {
        out << content;
        if (!out) throw IoError("failed writing to standard output");
    } else {
        write_text(path, content);
    }
}

void report_error(std::ostream& err, const char* category, const std::string& message) {
    err << nlohmann::json{{"error", category}, {"message", message}}.dump() << '\n';
}

}  // namespace

std::multimap<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open config file '" + path + "'");
    std::multimap<std::string, std::string> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw UsageError(path + ":" + std::to_string(lineno) + ": expected 'key = value'");
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key.erase(0, 2);
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw UsageError(path + ":" + std::to_string(lineno) + ": empty key");
        out.emplace(key, value);
    }
    return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config requires a path");
            config_path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config_path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config_path.empty()) return rest;

    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(rest.begin(), rest.end(),
                           [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
    };
    std::vector<std::string> merged = rest;
    for (const auto& [key, value] : read_config_file(config_path)) {
        if (given(key)) continue;
        std::stringstream ss(value);
        std::string item;
        bool any = false;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            merged.push_back("--" + key);
            merged.push_back(item);
            any = true;
        }
        if (!any) merged.push_back("--" + key);
    }
    return merged;
}

std::vector<int> parse_tau_list(const std::vector<std::string>& tokens) {
    auto to_int = [](const std::string& s) {
        std::size_t used = 0;
        int v = 0;
        try {
            v = std::stoi(s, &used);
        } catch (const std::exception&) {
            throw UsageError("invalid tau value '" + s + "'");
        }
        if (used != s.size()) throw UsageError("invalid tau value '" + s + "'");
        return v;
    };
    std::vector<int> out;
    for (const auto& raw : tokens) {
        std::stringstream ss(raw);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            tok = trim(tok);
            if (tok.empty()) continue;
            if (const auto dots = tok.find(".."); dots != std::string::npos) {
                const int a = to_int(tok.substr(0, dots));
                const int b = to_int(tok.substr(dots + 2));
                if (b < a) throw UsageError("empty tau range '" + tok + "'");
                for (int t = a; t <= b; ++t) out.push_back(t);
            } else {
                out.push_back(to_int(tok));
            }
        }
    }
    return out;
}

namespace {

struct Options {
    int n = 20;
    std::vector<double> theta;
    std::vector<std::string> tau;
    double eps = 1.0;
    std::size_t reps = 10000;
    std::size_t limit_reps = 200000;
    std::uint64_t seed = kDefaultSeed;
    std::uint64_t replication = 0;
    double delta = 1.0;
    double grid_step = 0.01;
    double truncation = 200.0;
    std::string out;
    std::string format = "csv";
    std::string input;
    std::string functional = "theta_tau";
    unsigned workers = 0;
    AsymptoticInputs asym;
};

int cmd_simulate_sequence(const Options& o, std::ostream& out) {
    if (o.theta.size() != 1) throw UsageError("simulate-sequence takes exactly one --theta");
    const auto taus = parse_tau_list(o.tau);
    if (taus.size() != 1) throw UsageError("simulate-sequence takes exactly one --tau");
    const ModelParams params{o.theta.front(), taus.front(), o.eps, o.n};
    params.validate();
    const auto sample = generate_sequence(params, RngStream{o.seed, o.replication});
    std::string content;
    if (o.format == "json") {
        content = nlohmann::json{{"theta", params.theta},
                                 {"tau", params.tau},
                                 {"eps", params.eps},
                                 {"n", params.n},
                                 {"seed", sample.seed},
                                 {"replication_index", sample.replication_index},
                                 {"x", sample.x}}
                      .dump(2) +
                  "\n";
    } else {
        std::ostringstream ss;
        write_sample_csv(ss, sample);
        content = ss.str();
    }
    emit(o.out, content, out);
    return ok;
}

int cmd_estimate(const Options& o, std::ostream& out) {
    if (o.input.empty()) throw UsageError("estimate requires --input");
    std::ifstream f(o.input);
    if (!f) throw IoError("cannot open input '" + o.input + "'");
    const auto x = read_series_csv(f);
    if (x.size() < 2) throw CsvParseError(0, "need at least 2 observations, got " + std::to_string(x.size()));
    const auto fn = make_functional(o.functional);
    const auto stats = cumulative_stats(x, o.eps);
    const auto post = bayes_posterior(stats);
    const auto est = estimate_all(x, o.eps, *fn);
    auto j = to_json(est, post);
    j["eps"] = o.eps;
    j["n"] = x.size();
    j["functional"] = fn->name();
    emit(o.out, j.dump(2) + "\n", out);
    return ok;
}

StudyConfig study_from(const Options& o) {
    StudyConfig c;
    c.n = o.n;
    c.eps = o.eps;
    c.theta_values = o.theta;
    c.tau_values = parse_tau_list(o.tau);
    c.reps = o.reps;
    c.seed = o.seed;
    c.functional_name = o.functional;
    c.workers = o.workers;
    return c;
}

void warn_degenerate(const StudyConfig& c, std::ostream& err) {
    for (double t : c.theta_values)
        if (t == 0.0) err << "warning: theta = 0 means no change; tau is not identifiable in those cells\n";
}

int cmd_risk_table(const Options& o, std::ostream& out, std::ostream& err) {
    auto cfg = study_from(o);
    if (cfg.theta_values.empty()) cfg.theta_values = figure1_config(o.seed).theta_values;
    if (cfg.tau_values.empty()) cfg.tau_values = figure1_config(o.seed).tau_values;
    cfg.validate();
    warn_degenerate(cfg, err);
    const auto table = run_study(cfg);
    std::string content;
    if (o.format == "json") {
        content = to_json(table).dump(2) + "\n";
    } else {
        std::ostringstream ss;
        write_risk_csv(ss, table);
        content = ss.str();
    }
    emit(o.out, content, out);
    return ok;
}

int cmd_limit_constants(const Options& o, std::ostream& out) {
    const auto grid = GridSpec::make(o.grid_step, o.truncation);
    if (grid.points() < 3) throw UsageError("grid must have at least 3 points");
    const auto c = estimate_limit_constants(o.delta, grid, o.limit_reps, o.seed, o.workers);
    emit(o.out, to_json(c, grid).dump(2) + "\n", out);
    return ok;
}

int cmd_asymptotic_risk(const Options& o, std::ostream& out) {
    const auto r = risk_expansion(o.asym);
    emit(o.out, to_json(o.asym, r).dump(2) + "\n", out);
    return ok;
}

int cmd_reproduce_figure1(const Options& o, std::ostream& out) {
    if (o.reps < 1) throw UsageError("--reps must be >= 1");
    const std::filesystem::path dir = o.out.empty() ? std::filesystem::path("figure1") : std::filesystem::path(o.out);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
    auto cfg = figure1_config(o.seed, o.reps);
    cfg.workers = o.workers;
    const auto table = run_study(cfg);
    std::ostringstream csv;
    write_risk_csv(csv, table);
    write_text((dir / "risk_table.csv").string(), csv.str());
    write_text((dir / "kappa.svg").string(), risk_figure_svg(table, Figure::kappa));
    write_text((dir / "kappa_tilde.svg").string(), risk_figure_svg(table, Figure::kappa_tilde));
    out << nlohmann::json{{"out_dir", dir.string()},
                          {"files", {"risk_table.csv", "kappa.svg", "kappa_tilde.svg"}},
                          {"cells", table.cells.size()},
                          {"reps", cfg.reps},
                          {"seed", cfg.seed}}
               .dump()
        << '\n';
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Change-point estimation toolkit: MLE vs generalized Bayes", "chpt"};
    app.require_subcommand(1, 1);

    auto* sim = app.add_subcommand("simulate-sequence", "Draw one sequence from the change-in-mean model");
    auto* est = app.add_subcommand("estimate", "MLE and Bayes estimates for a sequence read from CSV");
    auto* risk = app.add_subcommand("risk-table", "Monte Carlo risk ratios over a (theta, tau) grid");
    auto* lim = app.add_subcommand("limit-constants", "Monte Carlo constants of the limiting process");
    auto* asym = app.add_subcommand("asymptotic-risk", "First and second order asymptotic risks");
    auto* fig = app.add_subcommand("reproduce-figure1", "Risk-ratio study with CSV and SVG output");

    auto add_out = [&](CLI::App* c, const char* help) { c->add_option("--out", o.out, help); };
    auto add_seed = [&](CLI::App* c) { c->add_option("--seed", o.seed, "Base seed")->capture_default_str(); };
    auto add_workers = [&](CLI::App* c) {
        c->add_option("--workers", o.workers, "Worker threads (0 = all cores)")->capture_default_str();
    };
    auto positive = CLI::PositiveNumber;

    sim->add_option("--n", o.n, "Sequence length")->capture_default_str();
    sim->add_option("--theta", o.theta, "Change level")->required();
    sim->add_option("--tau", o.tau, "Change-point index")->required();
    sim->add_option("--eps", o.eps, "Noise level")->check(CLI::NonNegativeNumber)->capture_default_str();
    add_seed(sim);
    sim->add_option("--replication", o.replication, "Replication index (stream id)")->capture_default_str();
    sim->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    add_out(sim, "Output file (default: stdout)");

    est->add_option("--input", o.input, "CSV with one real per line, optional header 'x'")->required();
    est->add_option("--eps", o.eps, "Known noise level")->check(positive)->capture_default_str();
    est->add_option("--functional", o.functional, "Target functional")
        ->check(CLI::IsMember(functional_names()))
        ->capture_default_str();
    est->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json"}));
    add_out(est, "Output file (default: stdout)");

    risk->add_option("--n", o.n, "Sequence length")->capture_default_str();
    risk->add_option("--theta", o.theta, "Change level (repeatable)")->delimiter(',');
    risk->add_option("--tau", o.tau, "Change-point index, repeatable or a range a..b");
    risk->add_option("--eps", o.eps, "Noise level")->check(positive)->capture_default_str();
    risk->add_option("--reps", o.reps, "Replications per cell")->check(CLI::Range(1ul, 1ul << 40))->capture_default_str();
    add_seed(risk);
    risk->add_option("--functional", o.functional, "Target functional")
        ->check(CLI::IsMember(functional_names()))
        ->capture_default_str();
    add_workers(risk);
    risk->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
    add_out(risk, "Output file (default: stdout)");

    lim->add_option("--delta", o.delta, "Jump size")->check(positive)->capture_default_str();
    lim->add_option("--grid-step", o.grid_step, "Grid step at unit jump")->check(positive)->capture_default_str();
    lim->add_option("--truncation", o.truncation, "Grid half-width at unit jump")->check(positive)->capture_default_str();
    lim->add_option("--reps", o.limit_reps, "Replications (>= 100)")->check(CLI::Range(100ul, 1ul << 40))->capture_default_str();
    add_seed(lim);
    add_workers(lim);
    lim->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json"}));
    add_out(lim, "Output file (default: stdout)");

    asym->add_option("--eps", o.asym.eps, "Noise level")->check(positive)->capture_default_str();
    asym->add_option("--i1", o.asym.i1, "Fisher norm before the change")->check(positive)->capture_default_str();
    asym->add_option("--i2", o.asym.i2, "Fisher norm after the change")->check(positive)->capture_default_str();
    asym->add_option("--delta", o.asym.delta, "Jump size (nonzero)")->capture_default_str();
    asym->add_option("--dl-dtheta1", o.asym.dL_dtheta1, "dL/dtheta1");
    asym->add_option("--dl-dtheta2", o.asym.dL_dtheta2, "dL/dtheta2");
    asym->add_option("--dl-dtau", o.asym.dL_dtau, "dL/dtau");
    asym->add_option("--d2l-dtheta1", o.asym.d2L_dtheta1, "d2L/dtheta1^2");
    asym->add_option("--d2l-dtheta2", o.asym.d2L_dtheta2, "d2L/dtheta2^2");
    asym->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"json"}));
    add_out(asym, "Output file (default: stdout)");

    add_seed(fig);
    fig->add_option("--reps", o.reps, "Replications per cell")->capture_default_str();
    add_workers(fig);
    add_out(fig, "Output directory (default: ./figure1)");

    try {
        auto args = merge_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        report_error(err, "usage", e.what());
        return usage;
    } catch (const UsageError& e) {
        report_error(err, "usage", e.what());
        return usage;
    } catch (const IoError& e) {
        report_error(err, "io", e.what());
        return io;
    }

    try {
        if (sim->parsed()) return cmd_simulate_sequence(o, out);
        if (est->parsed()) return cmd_estimate(o, out);
        if (risk->parsed()) return cmd_risk_table(o, out, err);
        if (lim->parsed()) return cmd_limit_constants(o, out);
        if (asym->parsed()) return cmd_asymptotic_risk(o, out);
        if (fig->parsed()) return cmd_reproduce_figure1(o, out);
    } catch (const CsvParseError& e) {
        report_error(err, "input", e.what());
        return input;
    } catch (const IoError& e) {
        report_error(err, "io", e.what());
        return io;
    } catch (const UsageError& e) {
        report_error(err, "usage", e.what());
        return usage;
    } catch (const std::domain_error& e) {
        report_error(err, "numeric", e.what());
        return numeric;
    } catch (const std::invalid_argument& e) {
        report_error(err, "usage", e.what());
        return usage;
    }
    report_error(err, "usage", "no subcommand");
    return usage;
}

}  // namespace chpt::cli
