#include "dcdrtls/experiment.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include <json.hpp>

#include "dcdrtls/error.hpp"
#include "dcdrtls/filters.hpp"

namespace dcdrtls {

std::string_view to_string(FilterKind k) {
    switch (k) {
        case FilterKind::DcdRtls: return "dcd_rtls";
        case FilterKind::ExactRtls: return "exact_rtls";
        case FilterKind::Rls: return "rls";
        case FilterKind::Bcrls: return "bcrls";
    }
    return "?";
}

FilterKind filter_kind_from_string(std::string_view name) {
    for (auto k : {FilterKind::DcdRtls, FilterKind::ExactRtls, FilterKind::Rls, FilterKind::Bcrls})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown algorithm '" + std::string(name) + "' (expected dcd_rtls, exact_rtls, rls or bcrls)");
}

double ExperimentConfig::lambda() const { return 1.0 - std::ldexp(1.0, -p_exponent); }

void ExperimentConfig::validate() const {
    if (dim < 1) throw ConfigError("L must be >= 1");
    if (h_source != "paper" && h_source != "random") throw ConfigError("h_source must be 'paper' or 'random'");
    if (h_source == "paper" && dim != 8) throw ConfigError("the paper system has L = 8");
    if (!(eta >= 0)) throw ConfigError("eta must be nonnegative");
    if (!(gamma > 0)) throw ConfigError("gamma must be positive");
    if (p_exponent < 1 || p_exponent > 52) throw ConfigError("p_exponent must lie in [1, 52]");
    dcd.validate();
    if (runs < 1) throw ConfigError("runs must be >= 1");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (algos.empty()) throw ConfigError("at least one algorithm is required");
    if (!(delta > 0)) throw ConfigError("delta must be positive");
    if (threads < 1) throw ConfigError("threads must be >= 1");
}

ExperimentConfig config_from_json(const std::string& text, ExperimentConfig cfg) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    try {
        if (j.contains("L")) cfg.dim = j.at("L").get<int>();
        if (j.contains("h_source")) cfg.h_source = j.at("h_source").get<std::string>();
        if (j.contains("h_seed")) cfg.h_seed = j.at("h_seed").get<std::uint64_t>();
        if (j.contains("cov_seed")) cfg.cov_seed = j.at("cov_seed").get<std::uint64_t>();
        if (j.contains("eta")) cfg.eta = j.at("eta").get<double>();
        if (j.contains("gamma")) cfg.gamma = j.at("gamma").get<double>();
        if (j.contains("p_exponent")) cfg.p_exponent = j.at("p_exponent").get<int>();
        if (j.contains("dcd_n")) cfg.dcd.n_max = j.at("dcd_n").get<int>();
        if (j.contains("dcd_m")) cfg.dcd.m_bits = j.at("dcd_m").get<int>();
        if (j.contains("dcd_h")) cfg.dcd.h_range = j.at("dcd_h").get<double>();
        if (j.contains("runs")) cfg.runs = j.at("runs").get<int>();
        if (j.contains("steps")) cfg.steps = j.at("steps").get<long>();
        if (j.contains("algos")) {
            cfg.algos.clear();
            for (const auto& a : j.at("algos")) cfg.algos.push_back(filter_kind_from_string(a.get<std::string>()));
        }
        if (j.contains("seed")) cfg.base_seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("delta")) cfg.delta = j.at("delta").get<double>();
        if (j.contains("structured")) cfg.structured = j.at("structured").get<bool>();
        if (j.contains("theory_overlay")) cfg.theory_overlay = j.at("theory_overlay").get<bool>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["L"] = cfg.dim;
    j["h_source"] = cfg.h_source;
    j["h_seed"] = cfg.h_seed;
    j["cov_seed"] = cfg.cov_seed;
    j["eta"] = cfg.eta;
    j["gamma"] = cfg.gamma;
    j["p_exponent"] = cfg.p_exponent;
    j["dcd_n"] = cfg.dcd.n_max;
    j["dcd_m"] = cfg.dcd.m_bits;
    j["dcd_h"] = cfg.dcd.h_range;
    j["runs"] = cfg.runs;
    j["steps"] = cfg.steps;
    auto algos = nlohmann::json::array();
    for (auto a : cfg.algos) algos.push_back(std::string(to_string(a)));
    j["algos"] = algos;
    j["seed"] = cfg.base_seed;
    j["delta"] = cfg.delta;
    j["structured"] = cfg.structured;
    j["theory_overlay"] = cfg.theory_overlay;
    j["threads"] = cfg.threads;
    return j.dump(2);
}

EivModel build_model(const ExperimentConfig& cfg) {
    cfg.validate();
    EivModel model;
    if (cfg.h_source == "paper") {
        model.h = paper_system();
    } else {
        GaussianSource source(cfg.h_seed);
        model.h.resize(cfg.dim);
        for (Index i = 0; i < cfg.dim; ++i) model.h(i) = source() / std::sqrt(double(cfg.dim));
    }
    if (cfg.structured) {
        model.R = MatrixXd::Identity(cfg.dim, cfg.dim);
    } else {
        auto factors = gen_covariance(cfg.dim, cfg.cov_seed);
        model.R = factors.R;
        model.factors = std::move(factors);
    }
    model.eta = cfg.eta;
    model.xi = cfg.xi();
    return model;
}

TheoryModel build_theory(const ExperimentConfig& cfg) {
    const auto model = build_model(cfg);
    TheoryModel t{model.R, model.h, model.eta, model.xi, cfg.gamma, cfg.lambda()};
    t.validate();
    return t;
}

const MsdCurve& LearningCurves::curve(FilterKind k) const {
    for (const auto& c : curves)
        if (c.algo == to_string(k)) return c;
    throw InvalidInput("no curve for algorithm " + std::string(to_string(k)));
}

double to_db(double x) { return 10.0 * std::log10(x); }

namespace {

constexpr int kBlockSize = 8;

struct Reduction {
    std::vector<double> sum;
    int used = 0;
    int failed = 0;
    std::string first_error;
};

// Runs body(replica, out) for every replica and sums the per-replica vectors.
// Partial sums are formed per fixed block of replicas and combined in block
// order, so the result does not depend on the number of threads.
template <typename Body>
Reduction reduce_replicas(int runs, int threads, std::size_t width, Body body) {
    const int blocks = (runs + kBlockSize - 1) / kBlockSize;
    std::vector<Reduction> partial(static_cast<std::size_t>(blocks));
    std::atomic<int> next_block{0};

    auto worker = [&] {
        std::vector<double> replica(width);
        for (int b = next_block++; b < blocks; b = next_block++) {
            Reduction& part = partial[static_cast<std::size_t>(b)];
            part.sum.assign(width, 0.0);
            const int end = std::min(runs, (b + 1) * kBlockSize);
            for (int r = b * kBlockSize; r < end; ++r) {
                std::fill(replica.begin(), replica.end(), 0.0);
                try {
                    body(r, replica);
                } catch (const std::exception& e) {
                    if (part.failed++ == 0) part.first_error = "replica " + std::to_string(r) + ": " + e.what();
                    continue;
                }
                for (std::size_t i = 0; i < width; ++i) part.sum[i] += replica[i];
                ++part.used;
            }
        }
    };

    const int pool = std::max(1, std::min(threads, blocks));
    if (pool == 1) {
        worker();
    } else {
        std::vector<std::jthread> workers;
        for (int t = 0; t < pool; ++t) workers.emplace_back(worker);
    }

    Reduction total;
    total.sum.assign(width, 0.0);
    for (const auto& part : partial) {
        for (std::size_t i = 0; i < width; ++i) total.sum[i] += part.sum[i];
        total.used += part.used;
        total.failed += part.failed;
        if (total.first_error.empty()) total.first_error = part.first_error;
    }
    if (total.failed > 0 && 100 * total.failed >= runs)
        throw Error("too many failed replicas (" + std::to_string(total.failed) + " of " + std::to_string(runs) +
                    "); first failure: " + total.first_error);
    return total;
}

struct ReplicaFilters {
    std::optional<FilterState<double>> dcd;
    std::optional<ExactRtlsState<double>> exact;
    std::optional<RlsState<double>> rls;
    std::optional<BcrlsState<double>> bcrls;

    ReplicaFilters(const ExperimentConfig& cfg, const std::vector<FilterKind>& kinds) {
        const auto lambda = ForgettingFactor<double>::from_exponent(cfg.p_exponent);
        for (auto k : kinds) {
            switch (k) {
                case FilterKind::DcdRtls: {
                    DcdRtlsConfig<double> c;
                    c.dim = cfg.dim;
                    c.lambda = lambda;
                    c.delta = cfg.delta;
                    c.gamma = cfg.gamma;
                    c.dcd = cfg.dcd;
                    c.shift_structured = cfg.structured;
                    dcd = make_filter_state(c);
                    break;
                }
                case FilterKind::ExactRtls: exact = make_exact_rtls(cfg.dim, lambda, cfg.delta, cfg.gamma); break;
                case FilterKind::Rls: rls = make_rls(cfg.dim, lambda.value(), cfg.delta); break;
                case FilterKind::Bcrls: bcrls = make_bcrls(cfg.dim, lambda, cfg.delta, cfg.eta); break;
            }
        }
    }

    const VectorXd& step(FilterKind k, const VectorXd& x, double y) {
        switch (k) {
            case FilterKind::DcdRtls: return dcd_rtls_step(*dcd, x, y);
            case FilterKind::ExactRtls: return exact_rtls_step(*exact, x, y);
            case FilterKind::Rls: return rls_step(*rls, x, y);
            case FilterKind::Bcrls: return bcrls_step(*bcrls, x, y);
        }
        throw std::logic_error("unhandled filter kind");
    }
};

}  // namespace

LearningCurves run_learning_curves(const ExperimentConfig& cfg) {
    cfg.validate();
    const EivModel model = build_model(cfg);
    const std::size_t steps = static_cast<std::size_t>(cfg.steps);
    const std::size_t n_algos = cfg.algos.size();

    auto reduction = reduce_replicas(cfg.runs, cfg.threads, steps * n_algos, [&](int r, std::vector<double>& out) {
        EivStream stream(model, {cfg.structured, cfg.base_seed + static_cast<std::uint64_t>(r), cfg.steps});
        ReplicaFilters filters(cfg, cfg.algos);
        EivSample sample;
        for (std::size_t t = 0; t < steps; ++t) {
            stream.next(sample);
            for (std::size_t a = 0; a < n_algos; ++a) {
                const VectorXd& w = filters.step(cfg.algos[a], sample.x_noisy, sample.y_noisy);
                const double err = (w - model.h).squaredNorm();
                if (!std::isfinite(err)) throw Error("non-finite weight error at n = " + std::to_string(t + 1));
                out[a * steps + t] = err;
            }
        }
    });

    LearningCurves lc;
    lc.replicas_used = reduction.used;
    lc.replicas_failed = reduction.failed;
    if (reduction.failed > 0)
        lc.warnings.push_back("excluded " + std::to_string(reduction.failed) + " failed replica(s); first: " +
                              reduction.first_error);

    std::optional<std::vector<double>> theory_db;
    if (cfg.theory_overlay) {
        const auto curve = transient_msd_curve(build_theory(cfg), cfg.steps);
        theory_db.emplace();
        for (double v : curve) theory_db->push_back(to_db(v));
    }

    for (std::size_t a = 0; a < n_algos; ++a) {
        MsdCurve c;
        c.algo = std::string(to_string(cfg.algos[a]));
        c.n.resize(steps);
        c.msd.resize(steps);
        c.msd_db.resize(steps);
        for (std::size_t t = 0; t < steps; ++t) {
            c.n[t] = static_cast<long>(t + 1);
            c.msd[t] = reduction.sum[a * steps + t] / reduction.used;
            c.msd_db[t] = to_db(c.msd[t]);
        }
        const bool rtls_family = cfg.algos[a] == FilterKind::DcdRtls || cfg.algos[a] == FilterKind::ExactRtls;
        if (theory_db && rtls_family) c.theory_db = theory_db;
        lc.curves.push_back(std::move(c));
    }
    return lc;
}

std::vector<SweepRow> run_steady_state_sweep(const ExperimentConfig& base, const std::vector<double>& eta_grid) {
    std::vector<SweepRow> rows;
    for (std::size_t i = 0; i < eta_grid.size(); ++i) {
        if (!(eta_grid[i] > 0)) throw ConfigError("sweep: eta grid entries must be positive");
        if (i > 0 && !(eta_grid[i] > eta_grid[i - 1])) throw ConfigError("sweep: eta grid must be strictly increasing");
    }
    for (double eta : eta_grid) {
        ExperimentConfig cfg = base;
        cfg.eta = eta;
        const double lambda = cfg.lambda();
        cfg.steps = std::max(cfg.steps, static_cast<long>(std::ceil(20.0 / (1.0 - lambda))));
        cfg.validate();
        const EivModel model = build_model(cfg);
        const long window_start = cfg.steps - cfg.steps / 10;
        const long window = cfg.steps - window_start;

        auto reduction = reduce_replicas(cfg.runs, cfg.threads, 1, [&](int r, std::vector<double>& out) {
            EivStream stream(model, {cfg.structured, cfg.base_seed + static_cast<std::uint64_t>(r), cfg.steps});
            ReplicaFilters filters(cfg, {FilterKind::DcdRtls});
            EivSample sample;
            double acc = 0.0;
            for (long t = 0; t < cfg.steps; ++t) {
                stream.next(sample);
                const VectorXd& w = dcd_rtls_step(*filters.dcd, sample.x_noisy, sample.y_noisy);
                if (t >= window_start) acc += (w - model.h).squaredNorm();
            }
            if (!std::isfinite(acc)) throw Error("non-finite steady-state error");
            out[0] = acc;
        });

        SweepRow row;
        row.eta = eta;
        row.gamma = cfg.gamma;
        row.lambda = lambda;
        row.steps = cfg.steps;
        row.instances = static_cast<long>(reduction.used) * window;
        row.empirical_msd = reduction.sum[0] / static_cast<double>(row.instances);
        row.theory_msd = steady_state_msd(build_theory(cfg));
        row.empirical_db = to_db(row.empirical_msd);
        row.theory_db = to_db(row.theory_msd);
        rows.push_back(row);
    }
    return rows;
}

std::vector<StabilityRow> run_stability_curve(const MatrixXd& R, const std::vector<double>& eta_grid) {
    require_positive_definite(R, "stability curve");
    const auto eig = sym_eig(R);
    const double trace_inv = eig.eigenvalues.cwiseInverse().sum();
    const double zeta_min = eig.eigenvalues.minCoeff();
    const double zeta_max = eig.eigenvalues.maxCoeff();
    std::vector<StabilityRow> rows;
    rows.reserve(eta_grid.size());
    for (double eta : eta_grid) {
        if (!(eta >= 0)) throw ConfigError("stability: eta must be nonnegative");
        rows.push_back({eta, stability_lambda_bound(trace_inv, zeta_max, zeta_min, eta)});
    }
    return rows;
}

namespace {

std::string g6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

void write_curves_csv(std::ostream& os, const LearningCurves& lc) {
    os << "n,algo,msd_db,theory_db\n";
    for (const auto& c : lc.curves)
        for (std::size_t t = 0; t < c.n.size(); ++t) {
            os << c.n[t] << ',' << c.algo << ',' << g6(c.msd_db[t]) << ',';
            if (c.theory_db) os << g6((*c.theory_db)[t]);
            os << '\n';
        }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "eta,gamma,lambda,empirical_db,theory_db,instances\n";
    for (const auto& r : rows)
        os << g6(r.eta) << ',' << g6(r.gamma) << ',' << g6(r.lambda) << ',' << g6(r.empirical_db) << ','
           << g6(r.theory_db) << ',' << r.instances << '\n';
}

void write_stability_csv(std::ostream& os, const std::vector<StabilityRow>& rows) {
    os << "eta,lambda_bound\n";
    for (const auto& r : rows) os << g6(r.eta) << ',' << g6(r.lambda_bound) << '\n';
}

}  // namespace dcdrtls
