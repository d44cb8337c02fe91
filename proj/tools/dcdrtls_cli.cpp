// Command-line front end for the DCD-RTLS experiments.
//
//   dcdrtls curves     --eta 0.01 --runs 200 --steps 3000 --out curves.csv
//   dcdrtls sweep      --eta-grid 0.003,0.01,0.03,0.1 --gamma 1 --out sweep.csv
//   dcdrtls stability  --eta-grid 0,0.1,0.2 --out stability.csv
//   dcdrtls complexity --dims 4,8,16,32 --out complexity.csv

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dcdrtls/complexity.hpp"
#include "dcdrtls/error.hpp"
#include "dcdrtls/experiment.hpp"

namespace {

struct Overrides {
    std::string config_path;
    std::optional<int> dim;
    std::optional<double> eta;
    std::optional<double> gamma;
    std::optional<int> p_exponent;
    std::optional<int> dcd_n;
    std::optional<int> dcd_m;
    std::optional<double> dcd_h;
    std::optional<int> runs;
    std::optional<long> steps;
    std::optional<std::string> algos;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> cov_seed;
    std::optional<double> delta;
    std::optional<int> threads;
    bool structured = false;
    bool no_theory = false;
    std::string out;
};

void add_common(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--config", o.config_path, "JSON experiment manifest");
    cmd->add_option("--L", o.dim, "filter length");
    cmd->add_option("--eta", o.eta, "input-noise variance");
    cmd->add_option("--gamma", o.gamma, "output/input noise variance ratio");
    cmd->add_option("--p-exponent", o.p_exponent, "forgetting factor lambda = 1 - 2^-P");
    cmd->add_option("--dcd-n", o.dcd_n, "DCD updates per solve (N)");
    cmd->add_option("--dcd-m", o.dcd_m, "DCD step-ladder bits (M)");
    cmd->add_option("--dcd-h", o.dcd_h, "DCD amplitude range (H)");
    cmd->add_option("--runs", o.runs, "Monte-Carlo replicas");
    cmd->add_option("--steps", o.steps, "samples per replica");
    cmd->add_option("--algos", o.algos, "comma list of dcd_rtls,exact_rtls,rls,bcrls");
    cmd->add_option("--seed", o.seed, "base seed; replica r uses seed + r");
    cmd->add_option("--cov-seed", o.cov_seed, "seed of the input covariance");
    cmd->add_option("--delta", o.delta, "initial Phi = delta I");
    cmd->add_option("--threads", o.threads, "worker threads");
    cmd->add_flag("--structured", o.structured, "shift-structured input");
    cmd->add_flag("--no-theory", o.no_theory, "omit the theory overlay");
    cmd->add_option("--out", o.out, "CSV output path (stdout when omitted)");
}

std::vector<std::string> split(const std::string& text) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty()) parts.push_back(item);
    return parts;
}

std::vector<double> parse_doubles(const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split(text)) {
        try {
            out.push_back(std::stod(s));
        } catch (const std::exception&) {
            throw dcdrtls::ConfigError("not a number: '" + s + "'");
        }
    }
    return out;
}

dcdrtls::ExperimentConfig resolve(const Overrides& o) {
    dcdrtls::ExperimentConfig cfg;
    if (!o.config_path.empty()) {
        std::ifstream in(o.config_path);
        if (!in) throw dcdrtls::ConfigError("cannot open config file " + o.config_path);
        std::stringstream buf;
        buf << in.rdbuf();
        cfg = dcdrtls::config_from_json(buf.str(), cfg);
    }
    if (o.dim) cfg.dim = *o.dim;
    if (o.eta) cfg.eta = *o.eta;
    if (o.gamma) cfg.gamma = *o.gamma;
    if (o.p_exponent) cfg.p_exponent = *o.p_exponent;
    if (o.dcd_n) cfg.dcd.n_max = *o.dcd_n;
    if (o.dcd_m) cfg.dcd.m_bits = *o.dcd_m;
    if (o.dcd_h) cfg.dcd.h_range = *o.dcd_h;
    if (o.runs) cfg.runs = *o.runs;
    if (o.steps) cfg.steps = *o.steps;
    if (o.algos) {
        cfg.algos.clear();
        for (const auto& a : split(*o.algos)) cfg.algos.push_back(dcdrtls::filter_kind_from_string(a));
    }
    if (o.seed) cfg.base_seed = *o.seed;
    if (o.cov_seed) cfg.cov_seed = *o.cov_seed;
    if (o.delta) cfg.delta = *o.delta;
    if (o.threads) cfg.threads = *o.threads;
    if (o.structured) cfg.structured = true;
    if (o.no_theory) cfg.theory_overlay = false;
    cfg.validate();
    return cfg;
}

template <typename Writer>
void emit(const std::string& path, Writer write) {
    if (path.empty()) {
        write(std::cout);
        return;
    }
    std::ofstream out(path);
    if (!out) throw dcdrtls::ConfigError("cannot open output file " + path);
    write(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DCD-RTLS errors-in-variables experiments"};
    app.require_subcommand(1);

    Overrides curves_opts, sweep_opts, stability_opts, complexity_opts;
    std::string sweep_grid = "0.003,0.01,0.03,0.1";
    std::string stability_grid = "0,0.05,0.1,0.2,0.3,0.5,0.75,1";
    std::string dims = "4,8,16,32";

    auto* curves = app.add_subcommand("curves", "ensemble learning curves");
    add_common(curves, curves_opts);
    auto* sweep = app.add_subcommand("sweep", "steady-state MSD versus eta, with theory");
    add_common(sweep, sweep_opts);
    sweep->add_option("--eta-grid", sweep_grid, "comma list of eta values");
    auto* stability = app.add_subcommand("stability", "lower bound on lambda versus eta");
    add_common(stability, stability_opts);
    stability->add_option("--eta-grid", stability_grid, "comma list of eta values");
    auto* complexity = app.add_subcommand("complexity", "per-iteration operation counts and gate costs");
    add_common(complexity, complexity_opts);
    complexity->add_option("--dims", dims, "comma list of filter lengths");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*curves) {
            const auto cfg = resolve(curves_opts);
            const auto lc = dcdrtls::run_learning_curves(cfg);
            for (const auto& w : lc.warnings) std::cerr << "warning: " << w << '\n';
            emit(curves_opts.out, [&](std::ostream& os) { dcdrtls::write_curves_csv(os, lc); });
        } else if (*sweep) {
            const auto cfg = resolve(sweep_opts);
            const auto rows = dcdrtls::run_steady_state_sweep(cfg, parse_doubles(sweep_grid));
            emit(sweep_opts.out, [&](std::ostream& os) { dcdrtls::write_sweep_csv(os, rows); });
        } else if (*stability) {
            const auto cfg = resolve(stability_opts);
            const auto model = dcdrtls::build_model(cfg);
            const auto rows = dcdrtls::run_stability_curve(model.R, parse_doubles(stability_grid));
            emit(stability_opts.out, [&](std::ostream& os) { dcdrtls::write_stability_csv(os, rows); });
        } else if (*complexity) {
            const auto cfg = resolve(complexity_opts);
            std::vector<int> lengths;
            for (double d : parse_doubles(dims)) lengths.push_back(static_cast<int>(d));
            emit(complexity_opts.out, [&](std::ostream& os) {
                dcdrtls::write_complexity_csv(os, lengths, cfg.dcd.n_max, cfg.dcd.m_bits);
            });
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
