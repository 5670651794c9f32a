#pragma once

// Problem instances Y = Phi X + E: hypersphere sensing matrices, Rademacher
// joint-sparse coefficients and per-channel Gaussian noise.

#include "somp/types.hpp"

namespace somp {

/// m x n matrix whose columns have unit l2 norm (within 1e-12).
class SensingMatrix {
 public:
  /// Validates the unit-norm invariant; throws Error(InvalidArgument) otherwise.
  explicit SensingMatrix(MatrixXd columns);

  /// Rescales every column to unit norm. Zero columns are rejected.
  static SensingMatrix normalized(MatrixXd columns);

  const MatrixXd& matrix() const noexcept { return phi_; }
  Index rows() const noexcept { return phi_.rows(); }
  Index cols() const noexcept { return phi_.cols(); }
  auto col(Index j) const { return phi_.col(j); }

 private:
  MatrixXd phi_;
};

/// Per-channel noise standard deviations sigma_k, k = 1..K.
class NoiseSpec {
 public:
  explicit NoiseSpec(VectorXd sigma);

  const VectorXd& sigma() const noexcept { return sigma_; }
  Index channels() const noexcept { return sigma_.size(); }
  bool is_zero() const noexcept { return sigma_.isZero(0.0); }

 private:
  VectorXd sigma_;
};

struct JointSparseInstance {
  SensingMatrix phi;
  IndexSet support;  ///< sorted ascending
  MatrixXd x;        ///< n x K, zero outside `support`
  NoiseSpec noise;
  MatrixXd y;  ///< m x K
  MatrixXd e;  ///< m x K

  Index m() const noexcept { return phi.rows(); }
  Index n() const noexcept { return phi.cols(); }
  Index k() const noexcept { return x.cols(); }
};

struct ModelSummary {
  double mu_x_k = 0;       ///< min over the support of the mean |X_jk|
  double sigma_k = 0;      ///< root-mean-square noise level
  double omega_sigma = 1;  ///< ||sigma||_1 / (sqrt(K) ||sigma||_2)
  double snr = 0;          ///< mu_x_k / sigma_k, +inf for noiseless instances
};

/// Columns are independent standard Gaussian vectors normalised to unit norm,
/// i.e. uniform on the unit sphere.
SensingMatrix sample_sensing_matrix(Index m, Index n, Seed seed);

/// m x m identity; the orthonormal fixture used throughout the tests.
SensingMatrix identity_sensing_matrix(Index m);

/// (s, s*r, s, s*r, ...) of length k.
NoiseSpec alternating_sigma(double sigma_odd, double r_sigma, Index k);

/// Alternating pattern rescaled so that the mean noise power is exactly one.
NoiseSpec unit_mean_alternating_sigma(double r_sigma, Index k);

/// sqrt((1/K) sum sigma_k^2).
double mean_noise_level(const NoiseSpec& noise);

double omega_sigma(const NoiseSpec& noise);

ModelSummary summarize(const JointSparseInstance& instance);

/// Uniform size-`size` subset of [0, n), sorted ascending.
IndexSet sample_support(Index n, Index size, Seed seed);

/// m x K Gaussian noise, column c scaled by sigma_c; drawn column by column
/// from the Noise child stream of `seed`.
MatrixXd sample_noise(Index m, const NoiseSpec& noise, Seed seed);

/// Support, signs and noise come from independent child streams of `seed`.
/// Signs and noise are drawn channel by channel, so the first K' channels of
/// an instance with K > K' channels coincide with the K'-channel instance.
JointSparseInstance generate_instance(const SensingMatrix& phi, Index support_size, Index k,
                                      double mu_x, const NoiseSpec& noise, Seed seed);

/// Same as generate_instance but with a caller-chosen support. With the support
/// that generate_instance drew for `seed`, the result is bit-identical.
JointSparseInstance generate_instance_with_support(const SensingMatrix& phi,
                                                   const IndexSet& support, Index k,
                                                   double mu_x, const NoiseSpec& noise,
                                                   Seed seed);

/// Noiseless instance from explicit coefficients (Y = Phi X, E = 0).
JointSparseInstance make_noiseless_instance(const SensingMatrix& phi, MatrixXd x);

/// Divides X, E, Y and sigma by sigma(K).
JointSparseInstance rescale_to_unit_mean_noise(const JointSparseInstance& instance);

}  // namespace somp
