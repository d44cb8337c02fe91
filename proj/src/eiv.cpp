#include "dcdrtls/eiv.hpp"

#include <cmath>
#include <string>

#include "dcdrtls/error.hpp"

namespace dcdrtls {

CovarianceFactors gen_covariance(Index dim, std::uint64_t seed) {
    if (dim < 1) throw InvalidInput("gen_covariance: dimension must be >= 1");
    GaussianSource source(seed);

    VectorXd f(dim);
    for (Index i = 0; i < dim; ++i) f(i) = 0.2 + 1.6 * source.uniform();

    MatrixXd q(dim, dim);
    for (Index j = 0; j < dim; ++j)
        for (Index i = 0; i < dim; ++i) q(i, j) = source();

    // modified Gram-Schmidt; the implied triangular factor has a positive diagonal
    for (Index j = 0; j < dim; ++j) {
        for (Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
        const double norm = q.col(j).norm();
        if (!(norm > 1e-12)) throw InvalidInput("gen_covariance: degenerate Gaussian draw");
        q.col(j) /= norm;
    }

    MatrixXd r = q * f.asDiagonal() * q.transpose();
    r = (0.5 * (r + r.transpose())).eval();
    return {std::move(r), std::move(q), std::move(f)};
}

VectorXd paper_system() {
    VectorXd h(8);
    h << -0.019, -0.213, -0.600, +0.235, +0.574, +0.377, -0.056, -0.254;
    return h;
}

double EivModel::gamma() const {
    if (!(eta > 0)) throw InvalidModel("gamma = xi / eta is undefined for eta = 0");
    return xi / eta;
}

void EivModel::validate() const {
    const Index dim = h.size();
    if (dim < 1) throw InvalidModel("EIV model: empty system vector");
    if (R.rows() != dim || R.cols() != dim) throw InvalidModel("EIV model: R must be L x L");
    if (!h.allFinite() || !R.allFinite()) throw InvalidModel("EIV model: non-finite entries");
    if (!(eta >= 0) || !(xi >= 0)) throw InvalidModel("EIV model: noise variances must be nonnegative");
    try {
        require_positive_definite(R, "EIV model");
    } catch (const SingularMatrix&) {
        throw InvalidModel("EIV model: R must be positive-definite");
    }
}

namespace {

// sigma^2 when R = sigma^2 I, otherwise nothing
std::optional<double> scaled_identity_variance(const MatrixXd& r) {
    const double sigma2 = r(0, 0);
    for (Index j = 0; j < r.cols(); ++j)
        for (Index i = 0; i < r.rows(); ++i) {
            const double expected = i == j ? sigma2 : 0.0;
            if (std::abs(r(i, j) - expected) > 1e-12 * std::abs(sigma2)) return std::nullopt;
        }
    return sigma2;
}

}  // namespace

EivStream::EivStream(const EivModel& model, const StreamConfig& cfg)
    : h_(model.h),
      input_sd_(std::sqrt(model.eta)),
      output_sd_(std::sqrt(model.xi)),
      shift_(cfg.shift_structured),
      length_(cfg.length),
      gauss_(cfg.seed) {
    model.validate();
    if (cfg.length < 1) throw ConfigError("stream length must be >= 1");
    const Index dim = model.dim();
    if (shift_) {
        const auto sigma2 = scaled_identity_variance(model.R);
        if (!sigma2)
            throw ConfigError("shift-structured streams need R = sigma^2 I; a sliding window of a white "
                              "sequence cannot carry any other covariance");
        shift_sd_ = std::sqrt(*sigma2);
        clean_window_ = VectorXd::Zero(dim);
        noise_window_ = VectorXd::Zero(dim);
    } else if (model.factors) {
        mixing_ = model.factors->Q * model.factors->f.cwiseSqrt().asDiagonal();
        g_.resize(dim);
    } else {
        const auto eig = sym_eig(model.R);
        mixing_ = eig.eigenvectors * eig.eigenvalues.cwiseSqrt().asDiagonal();
        g_.resize(dim);
    }
}

void EivStream::next(EivSample& out) {
    if (done()) throw InvalidInput("EivStream: stream exhausted");
    const Index dim = h_.size();
    ++n_;
    out.n = n_;
    if (shift_) {
        for (Index i = dim - 1; i > 0; --i) {
            clean_window_(i) = clean_window_(i - 1);
            noise_window_(i) = noise_window_(i - 1);
        }
        clean_window_(0) = shift_sd_ * gauss_();
        noise_window_(0) = input_sd_ * gauss_();
        out.x_clean = clean_window_;
        out.x_noisy = clean_window_ + noise_window_;
    } else {
        for (Index i = 0; i < dim; ++i) g_(i) = gauss_();
        out.x_clean.noalias() = mixing_ * g_;
        out.x_noisy.resize(dim);
        for (Index i = 0; i < dim; ++i) out.x_noisy(i) = out.x_clean(i) + input_sd_ * gauss_();
    }
    out.y_clean = out.x_clean.dot(h_);
    out.y_noisy = out.y_clean + output_sd_ * gauss_();
}

EivSample EivStream::next() {
    EivSample out;
    next(out);
    return out;
}

std::vector<EivSample> sample_stream(const EivModel& model, const StreamConfig& cfg) {
    EivStream stream(model, cfg);
    std::vector<EivSample> out;
    out.reserve(static_cast<std::size_t>(cfg.length));
    while (!stream.done()) out.push_back(stream.next());
    return out;
}

}  // namespace dcdrtls
