#include "somp/noiseless.hpp"

#include "somp/error.hpp"
#include "somp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace somp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t checked_count(Index n, Index k, std::uint64_t guard, const char* what) {
  const auto count = binomial(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k));
  if (!count || *count > guard) {
    throw Error(Errc::CombinatorialBlowup,
                std::string(what) + ": C(" + std::to_string(n) + ", " + std::to_string(k) +
                    ") exceeds the enumeration guard of " + std::to_string(guard));
  }
  return *count;
}

IndexSet complement(Index n, const IndexSet& support) {
  IndexSet out;
  out.reserve(static_cast<std::size_t>(n) - support.size());
  auto it = support.begin();
  for (Index j = 0; j < n; ++j) {
    if (it != support.end() && *it == j) {
      ++it;
    } else {
      out.push_back(j);
    }
  }
  return out;
}

void check_support(const IndexSet& support, Index n) {
  if (support.empty()) throw Error(Errc::EmptySupport, "support is empty");
  if (!std::is_sorted(support.begin(), support.end()) ||
      std::adjacent_find(support.begin(), support.end()) != support.end() ||
      support.front() < 0 || support.back() >= n) {
    throw Error(Errc::InvalidArgument, "support must be sorted, distinct and within [0, n)");
  }
}

MatrixXd projector_for(const SensingMatrix& phi, const IndexSet& subset) {
  if (subset.empty()) return MatrixXd::Zero(phi.rows(), phi.rows());
  return orthogonal_projector(select_columns(phi.matrix(), subset));
}

}  // namespace

ProjectorFamily enumerate_projectors(const SensingMatrix& phi, const IndexSet& support, Index t,
                                     std::uint64_t guard) {
  check_support(support, phi.cols());
  const Index size = static_cast<Index>(support.size());
  if (t < 0 || t > size) throw Error(Errc::InvalidArgument, "projector order must satisfy 0 <= t <= |S|");
  checked_count(size, t, guard, "projector family");
  ProjectorFamily family;
  family.t = t;
  for_each_combination(size, t, [&](const std::vector<Index>& pos) {
    IndexSet subset;
    subset.reserve(pos.size());
    for (Index p : pos) subset.push_back(support[static_cast<std::size_t>(p)]);
    family.projectors.push_back(projector_for(phi, subset));
    family.subsets.push_back(std::move(subset));
  });
  return family;
}

MatrixXd beta_matrix(const SensingMatrix& phi, const MatrixXd& x, const MatrixXd& projector) {
  if (x.rows() != phi.cols()) throw Error(Errc::DimensionMismatch, "beta: X must have n rows");
  if (projector.rows() != phi.rows() || projector.cols() != phi.rows()) {
    throw Error(Errc::DimensionMismatch, "beta: projector must be m x m");
  }
  const MatrixXd signal = phi.matrix() * x;
  const MatrixXd residual = signal - projector * signal;
  return (phi.matrix().transpose() * residual).cwiseAbs();
}

GammaValues gamma_values(const MatrixXd& betas, const IndexSet& support) {
  check_support(support, betas.rows());
  if (static_cast<Index>(support.size()) == betas.rows()) {
    throw Error(Errc::FullSupport, "support covers every atom; no incorrect atom exists");
  }
  const VectorXd sums = betas.rowwise().sum();
  GammaValues out;
  auto it = support.begin();
  for (Index j = 0; j < betas.rows(); ++j) {
    const bool correct = it != support.end() && *it == j;
    if (correct) {
      ++it;
      if (out.jc < 0 || sums(j) > out.gamma_c) {
        out.gamma_c = sums(j);
        out.jc = j;
      }
    } else if (out.ji < 0 || sums(j) > out.gamma_i) {
      out.gamma_i = sums(j);
      out.ji = j;
    }
  }
  return out;
}

GammaRatio exact_gamma_ratio(const SensingMatrix& phi, const MatrixXd& x, const IndexSet& support,
                             Index s) {
  check_support(support, phi.cols());
  if (s < 0 || s >= static_cast<Index>(support.size())) {
    throw Error(Errc::InvalidArgument, "exact gamma ratio requires 0 <= s < |S|");
  }
  GammaRatio out{kInf, false};
  for (Index t = 0; t <= s; ++t) {
    const ProjectorFamily family = enumerate_projectors(phi, support, t);
    for (const MatrixXd& p : family.projectors) {
      const GammaValues g = gamma_values(beta_matrix(phi, x, p), support);
      if (g.gamma_i == 0.0) {
        out.degenerate = true;
        continue;
      }
      out.value = std::min(out.value, g.gamma_c / g.gamma_i);
    }
  }
  return out;
}

double ric_exhaustive(const SensingMatrix& phi, Index s, std::uint64_t guard) {
  if (s < 1 || s > phi.cols()) throw Error(Errc::InvalidArgument, "RIC order must satisfy 1 <= s <= n");
  checked_count(phi.cols(), s, guard, "restricted isometry constant");
  const MatrixXd gram = phi.matrix().transpose() * phi.matrix();
  double upper = -kInf;  // max lambda_max - 1
  double lower = -kInf;  // 1 - min lambda_min
  MatrixXd sub(s, s);
  for_each_combination(phi.cols(), s, [&](const std::vector<Index>& cols) {
    for (Index a = 0; a < s; ++a) {
      for (Index b = 0; b < s; ++b) {
        sub(a, b) = gram(cols[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
      }
    }
    const auto ext = symmetric_eigen_extremes(sub);
    upper = std::max(upper, ext.max - 1.0);
    lower = std::max(lower, 1.0 - ext.min);
  });
  return std::max(0.0, std::max(upper, lower));
}

double psi_lemma2(double delta, Index support_size) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(Errc::InvalidArgument, "psi requires 0 <= delta < 1");
  if (support_size < 1) throw Error(Errc::InvalidArgument, "psi requires |S| >= 1");
  return (1.0 - delta) * (1.0 + delta) /
         (1.0 + std::sqrt(static_cast<double>(support_size)) * delta);
}

double tau_x(const MatrixXd& x, const IndexSet& support) {
  if (support.empty()) throw Error(Errc::EmptySupport, "tau_x requires a nonempty support");
  double out = kInf;
  for (Index j : support) out = std::min(out, x.row(j).cwiseAbs().sum());
  return out;
}

double gamma_ratio_ric_bound(double delta, Index support_size) {
  if (!(delta >= 0.0 && delta < 1.0)) throw Error(Errc::InvalidArgument, "RIC bound requires 0 <= delta < 1");
  if (support_size < 2) throw Error(Errc::InvalidArgument, "RIC bound requires |S| >= 2");
  if (delta == 0.0) return kInf;
  const double size = static_cast<double>(support_size);
  return (1.0 - delta) * std::sqrt(size - 1.0) / (delta * size);
}

double gamma_ratio_erc_bound(const SensingMatrix& phi, const IndexSet& support) {
  check_support(support, phi.cols());
  const IndexSet off = complement(phi.cols(), support);
  if (off.empty()) return kInf;
  const MatrixXd coupling = least_squares_coefficients(select_columns(phi.matrix(), support),
                                                       select_columns(phi.matrix(), off));
  const double norm = operator_norm_one_one(coupling);
  return norm == 0.0 ? kInf : 1.0 / norm;
}

double folded_normal_mean(double mu, double sigma) {
  if (!(sigma >= 0.0)) throw Error(Errc::InvalidArgument, "folded normal requires sigma >= 0");
  if (sigma == 0.0) return std::abs(mu);
  const double z = mu / sigma;
  return sigma * std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * z * z) +
         mu * std::erf(z / std::numbers::sqrt2);
}

double expected_metric(const VectorXd& beta_row, const VectorXd& sigma_eff) {
  if (beta_row.size() != sigma_eff.size()) {
    throw Error(Errc::DimensionMismatch, "expected metric: beta and sigma lengths differ");
  }
  double sum = 0.0;
  for (Index k = 0; k < beta_row.size(); ++k) sum += folded_normal_mean(beta_row(k), sigma_eff(k));
  return sum;
}

VectorXd residual_atom_norms(const SensingMatrix& phi, const MatrixXd& projector) {
  return (phi.matrix() - projector * phi.matrix()).colwise().norm().transpose();
}

double delta_e_exact(const SensingMatrix& phi, const MatrixXd& x, const IndexSet& support,
                     const NoiseSpec& noise, const IndexSet& subset) {
  if (noise.channels() != x.cols()) throw Error(Errc::DimensionMismatch, "noise length must equal K");
  const MatrixXd p = projector_for(phi, subset);
  const MatrixXd betas = beta_matrix(phi, x, p);
  const GammaValues g = gamma_values(betas, support);
  const VectorXd scale = residual_atom_norms(phi, p);

  const double correct = expected_metric(betas.row(g.jc).transpose(), scale(g.jc) * noise.sigma());
  double incorrect = -kInf;
  auto it = support.begin();
  for (Index j = 0; j < phi.cols(); ++j) {
    if (it != support.end() && *it == j) {
      ++it;
      continue;
    }
    incorrect = std::max(incorrect, expected_metric(betas.row(j).transpose(), scale(j) * noise.sigma()));
  }
  return correct - incorrect;
}

VectorXd adversarial_single_atom_x(const SensingMatrix& phi, const IndexSet& support, Index eta,
                                   double x_eta) {
  check_support(support, phi.cols());
  if (support.size() < 2) throw Error(Errc::InvalidArgument, "adversarial construction needs |S| >= 2");
  if (!std::binary_search(support.begin(), support.end(), eta)) {
    throw Error(Errc::InvalidArgument, "eta must belong to the support");
  }
  if (x_eta == 0.0) throw Error(Errc::InvalidArgument, "x_eta must be nonzero");
  IndexSet rest;
  for (Index j : support) {
    if (j != eta) rest.push_back(j);
  }
  const VectorXd coeffs =
      -x_eta * least_squares_coefficients(select_columns(phi.matrix(), rest), phi.col(eta));
  VectorXd x = VectorXd::Zero(phi.cols());
  x(eta) = x_eta;
  for (std::size_t r = 0; r < rest.size(); ++r) x(rest[r]) = coeffs(static_cast<Index>(r));
  return x;
}

double adversarial_chi(const SensingMatrix& phi, const IndexSet& support, Index eta,
                       const VectorXd& x) {
  const VectorXd signal = phi.matrix() * x;
  double chi = 0.0;
  for (Index j : support) {
    if (j != eta) chi = std::max(chi, std::abs(phi.col(j).dot(signal)));
  }
  return chi;
}

NoiselessProfile compute_profile(const SensingMatrix& phi, const MatrixXd& x,
                                 const IndexSet& support, Index s,
                                 const ProfileOptions& options) {
  check_support(support, phi.cols());
  if (x.rows() != phi.cols()) throw Error(Errc::DimensionMismatch, "X must have n rows");
  const Index size = static_cast<Index>(support.size());
  if (s < 0 || s >= size) throw Error(Errc::InvalidArgument, "profile requires 0 <= s < |S|");

  NoiselessProfile profile;
  profile.s = s;
  profile.delta_ric = options.delta ? *options.delta : ric_exhaustive(phi, size, options.guard);
  profile.rip_holds = profile.delta_ric < 1.0;
  profile.psi = profile.rip_holds ? psi_lemma2(profile.delta_ric, size) : 0.0;
  profile.tau_x = tau_x(x, support);
  if (profile.rip_holds && size >= 2) {
    profile.gamma_ric_bound = gamma_ratio_ric_bound(profile.delta_ric, size);
  }
  if (size < phi.cols()) profile.gamma_erc_bound = gamma_ratio_erc_bound(phi, support);

  profile.gamma_exact = GammaRatio{kInf, false};
  for (Index t = 0; t <= s; ++t) {
    ProjectorFamily family = enumerate_projectors(phi, support, t, options.guard);
    for (std::size_t i = 0; i < family.subsets.size(); ++i) {
      ProjectorProfile entry;
      entry.t = t;
      entry.subset = std::move(family.subsets[i]);
      entry.projector = std::move(family.projectors[i]);
      entry.betas = beta_matrix(phi, x, entry.projector);
      entry.gamma = gamma_values(entry.betas, support);
      if (entry.gamma.gamma_i == 0.0) {
        profile.gamma_exact.degenerate = true;
      } else {
        profile.gamma_exact.value =
            std::min(profile.gamma_exact.value, entry.gamma.gamma_c / entry.gamma.gamma_i);
      }
      profile.entries.push_back(std::move(entry));
    }
  }
  return profile;
}

}  // namespace somp
