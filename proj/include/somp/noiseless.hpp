#pragma once

// Noiseless reliability of SOMP decisions: per-projector metrics, the relative
// reliability ratio and its lower bounds, restricted isometry constants, and
// expected metrics under the folded-normal noise model.

#include "somp/combinatorics.hpp"
#include "somp/signal_model.hpp"
#include "somp/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace somp {

/// Projectors onto every size-t subset of the support, in lexicographic
/// subset order. For t = 0 the single member is the zero matrix.
struct ProjectorFamily {
  Index t = 0;
  std::vector<IndexSet> subsets;
  std::vector<MatrixXd> projectors;
};

ProjectorFamily enumerate_projectors(const SensingMatrix& phi, const IndexSet& support, Index t,
                                     std::uint64_t guard = kDefaultCombinationGuard);

/// Entry (j, k) is |<phi_j, (I - P) Phi x_k>|.
MatrixXd beta_matrix(const SensingMatrix& phi, const MatrixXd& x, const MatrixXd& projector);

struct GammaValues {
  double gamma_c = 0;
  double gamma_i = 0;
  Index jc = -1;
  Index ji = -1;
};

/// Best row sums of `betas` over the support and over its complement.
GammaValues gamma_values(const MatrixXd& betas, const IndexSet& support);

/// min over t in [0, s] and P of gamma_c / gamma_i. Pairs with gamma_i == 0
/// contribute +inf and set `degenerate`; value is +inf if every pair does.
struct GammaRatio {
  double value = 0;
  bool degenerate = false;
};

GammaRatio exact_gamma_ratio(const SensingMatrix& phi, const MatrixXd& x, const IndexSet& support,
                             Index s);

/// Exact order-s restricted isometry constant by enumerating all C(n, s) supports.
double ric_exhaustive(const SensingMatrix& phi, Index s,
                      std::uint64_t guard = kDefaultCombinationGuard);

/// (1 - d)(1 + d) / (1 + sqrt(|S|) d).
double psi_lemma2(double delta, Index support_size);

/// min over the support of sum_k |X_jk|.
double tau_x(const MatrixXd& x, const IndexSet& support);

/// (1 - d) sqrt(|S| - 1) / (d |S|); +inf when d == 0.
double gamma_ratio_ric_bound(double delta, Index support_size);

/// 1 / ||Phi_S^+ Phi_Sbar||_{1->1}; +inf when the off-support atoms are
/// orthogonal to the support.
double gamma_ratio_erc_bound(const SensingMatrix& phi, const IndexSet& support);

/// E|mu + sigma g| for standard normal g.
double folded_normal_mean(double mu, double sigma);

/// sum_k E|beta_k + sigma_k g_k|.
double expected_metric(const VectorXd& beta_row, const VectorXd& sigma_eff);

/// ||(I - P) phi_j||_2 for every atom.
VectorXd residual_atom_norms(const SensingMatrix& phi, const MatrixXd& projector);

/// Expected noisy metric gap for the projector onto `subset` (t = |subset|):
/// E[f_jc] - max over incorrect atoms of E[f_j], with jc the noiseless best
/// correct atom.
double delta_e_exact(const SensingMatrix& phi, const MatrixXd& x, const IndexSet& support,
                     const NoiseSpec& noise, const IndexSet& subset);

/// Single-channel coefficients on `support` with x_eta given and the rest
/// chosen so every other correct atom has zero noiseless metric at t = 0.
VectorXd adversarial_single_atom_x(const SensingMatrix& phi, const IndexSet& support, Index eta,
                                   double x_eta);

/// max over support \ {eta} of |<phi_j, Phi_S x_S>|.
double adversarial_chi(const SensingMatrix& phi, const IndexSet& support, Index eta,
                       const VectorXd& x);

struct ProjectorProfile {
  Index t = 0;
  IndexSet subset;
  MatrixXd projector;
  MatrixXd betas;
  GammaValues gamma;
};

struct ProfileOptions {
  /// Use this RIC instead of enumerating; lets callers share one computation.
  std::optional<double> delta;
  std::uint64_t guard = kDefaultCombinationGuard;
};

struct NoiselessProfile {
  Index s = 0;
  std::vector<ProjectorProfile> entries;  ///< t = 0..s, subsets in lexicographic order
  GammaRatio gamma_exact;
  double delta_ric = 0;
  bool rip_holds = false;  ///< delta_ric < 1
  double psi = 0;          ///< 0 when !rip_holds
  double tau_x = 0;
  std::optional<double> gamma_ric_bound;  ///< needs |S| >= 2 and rip_holds
  std::optional<double> gamma_erc_bound;  ///< needs a proper support
};

NoiselessProfile compute_profile(const SensingMatrix& phi, const MatrixXd& x,
                                 const IndexSet& support, Index s,
                                 const ProfileOptions& options = {});

}  // namespace somp
