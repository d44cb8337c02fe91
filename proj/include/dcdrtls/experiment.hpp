#pragma once

// Monte-Carlo experiment runner: learning curves, steady-state sweeps over
// the input-noise variance and stability-bound curves, with CSV output.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dcdrtls/dcd.hpp"
#include "dcdrtls/eiv.hpp"
#include "dcdrtls/theory.hpp"

namespace dcdrtls {

enum class FilterKind { DcdRtls, ExactRtls, Rls, Bcrls };

std::string_view to_string(FilterKind k);
FilterKind filter_kind_from_string(std::string_view name);

struct ExperimentConfig {
    int dim = 8;
    /// "paper" or "random"
    std::string h_source = "paper";
    std::uint64_t h_seed = 7;
    std::uint64_t cov_seed = 2014;
    double eta = 0.01;
    double gamma = 1.0;
    int p_exponent = 10;
    DcdParams<double> dcd{1, 16, 1.0};
    int runs = 200;
    long steps = 3000;
    std::vector<FilterKind> algos{FilterKind::DcdRtls, FilterKind::ExactRtls};
    std::uint64_t base_seed = 1;
    double delta = 1e-2;
    bool structured = false;
    bool theory_overlay = true;
    int threads = 1;

    double lambda() const;
    double xi() const { return eta * gamma; }
    void validate() const;
};

/// Reads a JSON object; absent keys keep their defaults.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& cfg);

/// h, R and noise variances implied by a configuration.
EivModel build_model(const ExperimentConfig& cfg);
TheoryModel build_theory(const ExperimentConfig& cfg);

struct MsdCurve {
    std::string algo;
    std::vector<long> n;
    /// ensemble mean of ||w_n - h||^2
    std::vector<double> msd;
    std::vector<double> msd_db;
    std::optional<std::vector<double>> theory_db;
};

struct LearningCurves {
    std::vector<MsdCurve> curves;
    int replicas_used = 0;
    int replicas_failed = 0;
    std::vector<std::string> warnings;

    const MsdCurve& curve(FilterKind k) const;
};

/// Ensemble-averaged learning curves. Replica r uses stream seed base_seed + r.
/// Replicas whose filters throw are dropped with a warning when they are fewer
/// than 1% of the ensemble; otherwise the run aborts with the first error.
LearningCurves run_learning_curves(const ExperimentConfig& cfg);

struct SweepRow {
    double eta = 0;
    double gamma = 0;
    double lambda = 0;
    double empirical_msd = 0;
    double theory_msd = 0;
    double empirical_db = 0;
    double theory_db = 0;
    long instances = 0;
    long steps = 0;
};

/// Steady-state MSD of DCD-RTLS against the closed form, one row per eta.
/// The run length is raised to at least 20 / (1 - lambda) and the final 10%
/// of each run is averaged.
std::vector<SweepRow> run_steady_state_sweep(const ExperimentConfig& cfg, const std::vector<double>& eta_grid);

struct StabilityRow {
    double eta = 0;
    double lambda_bound = 0;
};

std::vector<StabilityRow> run_stability_curve(const MatrixXd& R, const std::vector<double>& eta_grid);

/// 10 log10(x)
double to_db(double x);

void write_curves_csv(std::ostream& os, const LearningCurves& lc);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);
void write_stability_csv(std::ostream& os, const std::vector<StabilityRow>& rows);

}  // namespace dcdrtls
