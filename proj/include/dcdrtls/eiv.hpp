#pragma once

// Errors-in-variables data generation: a ground-truth FIR system observed
// through a noisy input x~ = x + u and a noisy output y~ = x^T h + v.

#include <cstdint>
#include <optional>
#include <vector>

#include "dcdrtls/linalg.hpp"
#include "dcdrtls/random.hpp"

namespace dcdrtls {

using VectorXd = Vector<double>;
using MatrixXd = Matrix<double>;

/// R = Q diag(f) Q^T with Q orthogonal.
struct CovarianceFactors {
    MatrixXd R;
    MatrixXd Q;
    VectorXd f;
};

/// Random covariance with eigenvalues drawn uniformly from [0.2, 1.8] and
/// eigenvectors from Gram-Schmidt on a Gaussian matrix (positive-diagonal R factor).
CovarianceFactors gen_covariance(Index dim, std::uint64_t seed);

/// The 8-tap system used throughout the experiments.
VectorXd paper_system();

struct EivModel {
    VectorXd h;
    MatrixXd R;
    double eta = 0;  // input-noise variance
    double xi = 0;   // output-noise variance
    /// Optional eigen-factors of R; computed from R when absent.
    std::optional<CovarianceFactors> factors;

    Index dim() const { return h.size(); }
    /// xi / eta; requires eta > 0.
    double gamma() const;
    void validate() const;
};

struct StreamConfig {
    bool shift_structured = false;
    std::uint64_t seed = 0;
    long length = 1;
};

struct EivSample {
    VectorXd x_noisy;
    double y_noisy = 0;
    VectorXd x_clean;
    double y_clean = 0;
    long n = 0;
};

/// Single-owner sample generator.
///
/// Unstructured mode draws x_n ~ N(0, R) independently per step. Shift mode
/// slides a window over one white scalar sequence (R must be sigma^2 I) that is
/// pre-windowed: samples before n = 1 are zero.
///
/// Per step the draws happen in a fixed order: clean-input normals, then
/// input-noise normals, then the output-noise normal. Noise is drawn even when
/// a variance is zero, so streams with the same seed share their clean data.
class EivStream {
public:
    EivStream(const EivModel& model, const StreamConfig& cfg);

    bool done() const { return n_ >= length_; }
    long index() const { return n_; }
    EivSample next();
    /// Next sample in place, reusing the vectors in `out`.
    void next(EivSample& out);

private:
    VectorXd h_;
    MatrixXd mixing_;  // Q diag(sqrt f)
    double input_sd_;
    double output_sd_;
    double shift_sd_ = 0;
    bool shift_;
    long length_;
    long n_ = 0;
    GaussianSource gauss_;
    VectorXd g_;
    VectorXd clean_window_;
    VectorXd noise_window_;
};

/// Convenience: materialize a whole stream.
std::vector<EivSample> sample_stream(const EivModel& model, const StreamConfig& cfg);

}  // namespace dcdrtls
