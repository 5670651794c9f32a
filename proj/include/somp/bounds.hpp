#pragma once

// Failure-probability bounds for SOMP under per-channel Gaussian noise.
// Bounds above one are reported as-is and flagged vacuous.

#include "somp/noiseless.hpp"
#include "somp/signal_model.hpp"
#include "somp/types.hpp"

#include <cstdint>
#include <optional>

namespace somp {

/// Best Lipschitz constant of the per-atom metric: ||sigma_eff||_2.
double lipschitz_constant(const VectorXd& sigma_eff);

struct TailEstimate {
  double alpha = 0;
  double p_correct_low = 0;      ///< P[f_jc <= alpha]
  double p_incorrect_high = 0;   ///< sum over incorrect j of P[f_j >= alpha]
  double se_correct = 0;
  double se_incorrect = 0;
  std::uint64_t samples = 0;

  double bound() const noexcept { return p_correct_low + p_incorrect_high; }
};

/// alpha halfway between E[f_jc] and the largest incorrect expectation.
double theorem1_midpoint_alpha(const SensingMatrix& phi, const MatrixXd& x,
                               const IndexSet& support, const NoiseSpec& noise,
                               const IndexSet& subset);

/// Sampling estimate of the one-iteration two-term bound at threshold alpha
/// for the projector onto `subset`. Needs samples >= 10^4.
TailEstimate theorem1_tail_estimate(const SensingMatrix& phi, const MatrixXd& x,
                                    const IndexSet& support, const NoiseSpec& noise,
                                    const IndexSet& subset, double alpha, std::uint64_t samples,
                                    Seed seed);

struct ProbabilityBound {
  double value = 0;
  bool valid = false;    ///< the gap driving the bound is positive
  bool vacuous = false;  ///< value >= 1
};

/// (n - |S| + 1) exp(-dE^2 / (8 ||sigma||_2^2)); the exponent uses lambda = 1/2.
ProbabilityBound theorem2_bound(double delta_e_tp, const NoiseSpec& sigma, Index n,
                                Index support_size);

struct CsValue {
  std::uint64_t exact = 0;  ///< sum_{t=0}^{s} C(|S|, t)
  double upper = 0;         ///< (e (|S| + s - 1) / s)^s + 1, or 1 when s == 0
};

CsValue c_s(Index support_size, Index s);

/// (1 - 1/Gamma) psi tau_X - sqrt(2/pi) ||sigma||_1. Gamma may be +inf.
double delta_e_global(double gamma, double psi, double tau_x, const NoiseSpec& sigma);

/// n C_s exp(-dE^2 / (8 ||sigma||_2^2)); invalid with the n C_s ceiling when dE <= 0.
ProbabilityBound theorem3_bound(double delta_e, const NoiseSpec& sigma, Index n,
                                Index support_size, Index s);

/// (1 - 1/Gamma) psi SNR - sqrt(2/pi) omega.
double xi(double gamma, double psi, double snr_min, double omega_sigma);

/// (8 / xi^2) log(n C_s / p_err).
double k_min_theoretical(double xi, Index n, double c_s, double p_err);

struct BoundReport {
  double gamma = 0;
  std::optional<double> delta_e_global;  ///< empty when Gamma <= 1
  std::optional<double> delta_e_exact_min;
  double theorem3_bound = 0;
  std::uint64_t c_s_exact = 0;
  double c_s_upper = 0;
  std::optional<double> xi;
  std::optional<double> k_min_theoretical;  ///< empty unless xi > 0
  double p_err = 0;
  bool valid = false;    ///< delta_e_global > 0
  bool vacuous = false;  ///< theorem3_bound >= 1
};

/// Assembles the full report from a profile computed with the same s.
BoundReport bound_report(const NoiselessProfile& profile, const JointSparseInstance& instance,
                         double p_err, bool with_exact_gap = true);

}  // namespace somp
