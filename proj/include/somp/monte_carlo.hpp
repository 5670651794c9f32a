#pragma once

// Seeded Monte-Carlo estimation of SOMP failure probabilities.
//
// A trial draws a fresh support, Rademacher signs and noise from
// trial_seed(master_seed, index) and runs SOMP for exactly |S| iterations; it
// fails when any selected atom lies outside the support. Outcomes depend only
// on (config, index), so aggregates are identical for any worker count.

#include "somp/signal_model.hpp"
#include "somp/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace somp {

/// Either an alternating (sigma_odd, r_sigma) pattern or an explicit vector.
struct NoiseDescriptor {
  double sigma_odd = 1.0;
  double r_sigma = 1.0;
  std::optional<VectorXd> explicit_sigma;

  NoiseSpec realize(Index k) const;
};

struct TrialConfig {
  Index m = 0;
  Index n = 0;
  Index support_size = 0;
  Index k = 1;
  double mu_x = 1.0;
  NoiseDescriptor noise;
  bool fresh_matrix = false;  ///< resample Phi per trial instead of one fixed Phi
  Seed matrix_seed = 0;
  Seed master_seed = 0;
};

/// Throws Error(Config) naming the violated constraint.
void validate(const TrialConfig& config);

struct TrialOutcome {
  bool success = false;
  Index first_error_iteration = -1;  ///< -1 when every selection was correct
};

struct WilsonInterval {
  double low = 0;
  double high = 0;
};

inline constexpr double kWilsonZ95 = 1.959963984540054;

WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials, double z = kWilsonZ95);

struct McResult {
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double p_fail = 0;
  double ci_low = 0;
  double ci_high = 0;

  /// Wilson score standard error: the 95% half-width divided by z.
  double standard_error() const;
};

McResult make_result(std::uint64_t failures, std::uint64_t trials);

/// One experiment: the config plus its fixed sensing matrix (when not fresh).
class Experiment {
 public:
  explicit Experiment(TrialConfig config);

  const TrialConfig& config() const noexcept { return config_; }
  const SensingMatrix& fixed_matrix() const;

  TrialOutcome run_trial(std::uint64_t index) const;
  McResult estimate_pfail(std::uint64_t trials, unsigned jobs = 1) const;

 private:
  TrialConfig config_;
  std::optional<SensingMatrix> phi_;
};

TrialOutcome run_trial(const TrialConfig& config, std::uint64_t trial_index);
McResult estimate_pfail(const TrialConfig& config, std::uint64_t trials, unsigned jobs = 1);

/// Failure (any incorrect atom within `iterations` passes) over noise-only
/// trials: Phi, support and X stay fixed while E is redrawn per trial.
McResult estimate_pfail_fixed_signal(const SensingMatrix& phi, const MatrixXd& x,
                                     const IndexSet& support, const NoiseSpec& noise,
                                     Index iterations, std::uint64_t trials, Seed seed,
                                     unsigned jobs = 1);

/// One SOMP selection on the residual (I - P) Y with P the projector onto
/// `subset`; fails when the selected atom is outside the support.
McResult estimate_one_iteration_failure(const SensingMatrix& phi, const MatrixXd& x,
                                        const IndexSet& support, const NoiseSpec& noise,
                                        const IndexSet& subset, std::uint64_t trials, Seed seed,
                                        unsigned jobs = 1);

struct GridCell {
  double snr = 1.0;
  Index k = 1;
  double r_sigma = 1.0;
};

/// Template with k, mu_x = snr and a unit-mean alternating noise pattern, so
/// that the instance SNR equals cell.snr.
TrialConfig cell_config(const TrialConfig& base, const GridCell& cell);

/// Cartesian product in snr-major, then k, then r_sigma order.
std::vector<GridCell> make_grid(const std::vector<double>& snr, const std::vector<Index>& k,
                                const std::vector<double>& r_sigma);

struct SweepRow {
  GridCell cell;
  McResult result;
  std::optional<std::string> error;  ///< per-cell failure, recorded instead of thrown
};

std::vector<SweepRow> sweep(const std::vector<GridCell>& grid, std::uint64_t trials,
                            const TrialConfig& base, unsigned jobs = 1);

enum class KminMethod { LinearScan, Bisection };

/// Lazily evaluated p_fail(K) for one (snr, r_sigma) column; estimates are
/// cached so several thresholds can share the simulations.
class PfailCurve {
 public:
  PfailCurve(TrialConfig base, double snr, double r_sigma, std::uint64_t trials, unsigned jobs = 1);

  const McResult& at(Index k);
  const std::map<Index, McResult>& evaluated() const noexcept { return cache_; }
  double snr() const noexcept { return snr_; }
  double r_sigma() const noexcept { return r_sigma_; }

 private:
  TrialConfig base_;
  double snr_;
  double r_sigma_;
  std::uint64_t trials_;
  unsigned jobs_;
  std::map<Index, McResult> cache_;
};

/// Smallest K in {k_lo, k_lo + step, ...} <= k_hi with p_fail(K) <= p_err.
/// Bisection assumes p_fail is nonincreasing in K. Throws Error(NotFound).
Index empirical_kmin(PfailCurve& curve, double p_err, Index k_lo, Index k_hi, Index step = 1,
                     KminMethod method = KminMethod::LinearScan);

}  // namespace somp
