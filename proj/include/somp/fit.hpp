#pragma once

// Three-parameter K_min model
//   K_min(p_err) = 8 / (alpha SNR - beta omega)^2 * (gamma - log p_err)
// identified by exhaustive grid search on the cost
//   sum_rows [ sqrt(K_min) (alpha SNR - beta omega) - sqrt(8 (gamma - log p_err)) ]^2.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace somp {

struct FitRow {
  double p_err = 0.5;
  double snr_min = 1.0;
  double omega_sigma = 1.0;
  double k_min = 1.0;  ///< empirical K_min; stored as a real so planted data can be exact
};

using FitDataset = std::vector<FitRow>;

/// Throws Error(InvalidArgument) on a row with p_err outside (0,1), k_min < 1
/// or non-finite fields.
void validate(const FitDataset& dataset);

struct FitParams {
  double alpha = 1.0;
  double beta = 0.0;
  double gamma = 0.0;
};

/// Inclusive uniform axis lo, lo + step, ..., hi with `points` nodes.
struct GridAxis {
  double lo = 0;
  double hi = 1;
  std::size_t points = 500;

  double step() const;
  double node(std::size_t i) const;
};

enum class FitMode { Full, CoarseToFine };

struct FitGrid {
  GridAxis alpha;
  GridAxis beta;
  GridAxis gamma;
  FitMode mode = FitMode::Full;
  std::size_t coarse_points = 50;  ///< per-axis points of each stage in CoarseToFine mode

  /// 500 points per axis over [0.1,1.4] x [0,sqrt(2/pi)] x [0,5].
  static FitGrid paper_default();
};

struct FitResult {
  FitParams params;
  double cost = 0;
  FitGrid grid;                         ///< the requested grid
  std::optional<FitGrid> refined_stage;  ///< CoarseToFine: axes of the second stage
};

/// Exact cost; 0 for an empty dataset. Throws Error(InfeasibleGamma) when
/// gamma < log p_err for some row.
double fit_cost(const FitParams& params, const FitDataset& dataset);

/// Grid point minimising fit_cost; ties go to the lexicographically smallest
/// (alpha, beta, gamma). Infeasible gamma nodes are skipped; throws
/// Error(NoFeasiblePoint) if none remain and Error(InvalidArgument) on an
/// empty dataset. The result is identical for every `jobs`.
FitResult grid_fit(const FitDataset& dataset, const FitGrid& grid, unsigned jobs = 1);

/// Eq. (16). Throws Error(BelowSnrFloor) when alpha SNR <= beta omega and
/// Error(InfeasibleGamma) when gamma < log p_err.
double predict_kmin(const FitParams& params, double snr_min, double omega_sigma, double p_err);

std::string to_string(FitMode mode);

}  // namespace somp
