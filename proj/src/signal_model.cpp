#include "somp/signal_model.hpp"

#include "somp/error.hpp"
#include "somp/linalg.hpp"
#include "somp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace somp {

namespace {

constexpr double kUnitNormTolerance = 1e-12;

void check_finite(const MatrixXd& a, const char* what) {
  if (!a.allFinite()) throw Error(Errc::InvalidArgument, std::string(what) + " has non-finite entries");
}

}  // namespace

SensingMatrix::SensingMatrix(MatrixXd columns) : phi_(std::move(columns)) {
  if (phi_.rows() < 1 || phi_.cols() < 1) {
    throw Error(Errc::InvalidDimensions, "sensing matrix must be non-empty");
  }
  check_finite(phi_, "sensing matrix");
  for (Index j = 0; j < phi_.cols(); ++j) {
    if (std::abs(phi_.col(j).norm() - 1.0) > kUnitNormTolerance) {
      throw Error(Errc::InvalidArgument,
                  "sensing matrix column " + std::to_string(j) + " is not unit norm");
    }
  }
}

SensingMatrix SensingMatrix::normalized(MatrixXd columns) {
  for (Index j = 0; j < columns.cols(); ++j) {
    const double norm = columns.col(j).norm();
    if (!(norm > 0.0)) throw Error(Errc::InvalidArgument, "zero column cannot be normalised");
    columns.col(j) /= norm;
  }
  return SensingMatrix(std::move(columns));
}

NoiseSpec::NoiseSpec(VectorXd sigma) : sigma_(std::move(sigma)) {
  if (sigma_.size() < 1) throw Error(Errc::InvalidDimensions, "noise spec needs K >= 1 channels");
  if (!sigma_.allFinite() || (sigma_.array() < 0.0).any()) {
    throw Error(Errc::InvalidArgument, "noise levels must be finite and nonnegative");
  }
}

SensingMatrix sample_sensing_matrix(Index m, Index n, Seed seed) {
  if (m < 1 || n < m) {
    throw Error(Errc::InvalidDimensions, "sensing matrix requires 1 <= m <= n");
  }
  Engine engine(derive_seed(seed, Stream::Matrix));
  std::normal_distribution<double> normal;
  MatrixXd phi(m, n);
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < m; ++i) phi(i, j) = normal(engine);
  }
  return SensingMatrix::normalized(std::move(phi));
}

SensingMatrix identity_sensing_matrix(Index m) {
  if (m < 1) throw Error(Errc::InvalidDimensions, "identity matrix requires m >= 1");
  return SensingMatrix(MatrixXd::Identity(m, m));
}

NoiseSpec alternating_sigma(double sigma_odd, double r_sigma, Index k) {
  if (k < 1) throw Error(Errc::InvalidDimensions, "alternating sigma requires k >= 1");
  if (!(sigma_odd >= 0.0) || !(r_sigma >= 0.0)) {
    throw Error(Errc::InvalidArgument, "alternating sigma requires nonnegative levels");
  }
  VectorXd sigma(k);
  for (Index i = 0; i < k; ++i) sigma(i) = (i % 2 == 0) ? sigma_odd : sigma_odd * r_sigma;
  return NoiseSpec(std::move(sigma));
}

NoiseSpec unit_mean_alternating_sigma(double r_sigma, Index k) {
  const NoiseSpec pattern = alternating_sigma(1.0, r_sigma, k);
  const double level = mean_noise_level(pattern);
  return NoiseSpec(pattern.sigma() / level);
}

double mean_noise_level(const NoiseSpec& noise) {
  return noise.sigma().norm() / std::sqrt(static_cast<double>(noise.channels()));
}

double omega_sigma(const NoiseSpec& noise) {
  const double l2 = noise.sigma().norm();
  if (!(l2 > 0.0)) throw Error(Errc::AllZeroNoise, "omega_sigma undefined for an all-zero noise vector");
  const double l1 = noise.sigma().lpNorm<1>();
  return l1 / (l2 * std::sqrt(static_cast<double>(noise.channels())));
}

ModelSummary summarize(const JointSparseInstance& instance) {
  if (instance.support.empty()) throw Error(Errc::EmptySupport, "summary requires a nonempty support");
  ModelSummary out;
  const double k = static_cast<double>(instance.k());
  double mu = std::numeric_limits<double>::infinity();
  for (Index j : instance.support) mu = std::min(mu, instance.x.row(j).cwiseAbs().sum() / k);
  out.mu_x_k = mu;
  out.sigma_k = mean_noise_level(instance.noise);
  if (instance.noise.is_zero()) {
    // Noiseless: flatness is conventionally 1 and the ratio unbounded.
    out.omega_sigma = 1.0;
    out.snr = std::numeric_limits<double>::infinity();
  } else {
    out.omega_sigma = omega_sigma(instance.noise);
    out.snr = out.mu_x_k / out.sigma_k;
  }
  return out;
}

IndexSet sample_support(Index n, Index size, Seed seed) {
  if (size < 0 || size > n) throw Error(Errc::InvalidDimensions, "support size exceeds n");
  Engine engine(derive_seed(seed, Stream::Support));
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  // Partial Fisher-Yates.
  for (Index i = 0; i < size; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(engine))]);
  }
  IndexSet support(pool.begin(), pool.begin() + size);
  std::sort(support.begin(), support.end());
  return support;
}

MatrixXd sample_noise(Index m, const NoiseSpec& noise, Seed seed) {
  if (m < 1) throw Error(Errc::InvalidDimensions, "noise needs m >= 1 rows");
  Engine gauss(derive_seed(seed, Stream::Noise));
  std::normal_distribution<double> normal;
  MatrixXd e(m, noise.channels());
  for (Index c = 0; c < noise.channels(); ++c) {
    const double level = noise.sigma()(c);
    for (Index i = 0; i < m; ++i) e(i, c) = level * normal(gauss);
  }
  return e;
}

JointSparseInstance generate_instance(const SensingMatrix& phi, Index support_size, Index k,
                                      double mu_x, const NoiseSpec& noise, Seed seed) {
  if (support_size < 1 || support_size > phi.rows()) {
    throw Error(Errc::InvalidDimensions, "support size must satisfy 1 <= |S| <= m");
  }
  return generate_instance_with_support(phi, sample_support(phi.cols(), support_size, seed), k,
                                        mu_x, noise, seed);
}

JointSparseInstance generate_instance_with_support(const SensingMatrix& phi,
                                                   const IndexSet& support, Index k,
                                                   double mu_x, const NoiseSpec& noise,
                                                   Seed seed) {
  const Index m = phi.rows();
  const Index n = phi.cols();
  if (k < 1) throw Error(Errc::InvalidDimensions, "k must be >= 1");
  if (noise.channels() != k) throw Error(Errc::InvalidDimensions, "noise length must equal k");
  if (support.empty() || static_cast<Index>(support.size()) > m) {
    throw Error(Errc::InvalidDimensions, "support size must satisfy 1 <= |S| <= m");
  }
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end() ||
      support.front() < 0 || support.back() >= n) {
    throw Error(Errc::InvalidArgument, "support must be sorted, distinct and within [0, n)");
  }
  if (!std::isfinite(mu_x)) throw Error(Errc::InvalidArgument, "mu_x must be finite");

  const Index s = static_cast<Index>(support.size());
  Engine signs(derive_seed(seed, Stream::Signs));
  MatrixXd x_s(s, k);
  for (Index c = 0; c < k; ++c) {
    for (Index r = 0; r < s; ++r) x_s(r, c) = (signs() >> 63) ? mu_x : -mu_x;
  }
  MatrixXd e = sample_noise(m, noise, seed);

  MatrixXd x = MatrixXd::Zero(n, k);
  for (Index r = 0; r < s; ++r) x.row(support[static_cast<std::size_t>(r)]) = x_s.row(r);
  // Only the support columns contribute; Phi_S X_S is the arithmetic path of record.
  MatrixXd y = select_columns(phi.matrix(), support) * x_s + e;
  return JointSparseInstance{phi, support, std::move(x), noise, std::move(y), std::move(e)};
}

JointSparseInstance make_noiseless_instance(const SensingMatrix& phi, MatrixXd x) {
  if (x.rows() != phi.cols() || x.cols() < 1) {
    throw Error(Errc::DimensionMismatch, "coefficients must be n x K");
  }
  check_finite(x, "coefficients");
  IndexSet support;
  for (Index j = 0; j < x.rows(); ++j) {
    if (!x.row(j).isZero(0.0)) support.push_back(j);
  }
  MatrixXd y = phi.matrix() * x;
  MatrixXd e = MatrixXd::Zero(phi.rows(), x.cols());
  NoiseSpec noise(VectorXd::Zero(x.cols()));
  return JointSparseInstance{phi, std::move(support), std::move(x), std::move(noise),
                             std::move(y), std::move(e)};
}

JointSparseInstance rescale_to_unit_mean_noise(const JointSparseInstance& instance) {
  const double zeta = mean_noise_level(instance.noise);
  if (!(zeta > 0.0)) throw Error(Errc::AllZeroNoise, "cannot rescale an all-zero noise vector");
  if (zeta == 1.0) return instance;
  JointSparseInstance out = instance;
  out.x /= zeta;
  out.e /= zeta;
  out.y /= zeta;
  out.noise = NoiseSpec(instance.noise.sigma() / zeta);
  return out;
}

}  // namespace somp
