#include "somp/bounds.hpp"

#include "somp/error.hpp"
#include "somp/linalg.hpp"
#include "somp/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace somp {

namespace {

const double kSqrtTwoOverPi = std::sqrt(2.0 / std::numbers::pi);

struct AtomModel {
  MatrixXd betas;
  VectorXd scale;  // ||(I - P) phi_j||
  GammaValues gamma;
};

AtomModel atom_model(const SensingMatrix& phi, const MatrixXd& x, const IndexSet& support,
                     const IndexSet& subset) {
  const MatrixXd p = subset.empty() ? MatrixXd::Zero(phi.rows(), phi.rows()).eval()
                                    : orthogonal_projector(select_columns(phi.matrix(), subset));
  AtomModel model;
  model.betas = beta_matrix(phi, x, p);
  model.scale = residual_atom_norms(phi, p);
  model.gamma = gamma_values(model.betas, support);
  return model;
}

double gamma_factor(double gamma) {
  if (!(gamma > 1.0)) throw Error(Errc::GammaNotAboveOne, "Gamma must exceed one");
  return 1.0 - 1.0 / gamma;  // 1 for Gamma = +inf
}

}  // namespace

double lipschitz_constant(const VectorXd& sigma_eff) { return sigma_eff.norm(); }

double theorem1_midpoint_alpha(const SensingMatrix& phi, const MatrixXd& x,
                               const IndexSet& support, const NoiseSpec& noise,
                               const IndexSet& subset) {
  const AtomModel model = atom_model(phi, x, support, subset);
  const auto mean = [&](Index j) {
    return expected_metric(model.betas.row(j).transpose(), model.scale(j) * noise.sigma());
  };
  double incorrect = -std::numeric_limits<double>::infinity();
  for (Index j = 0; j < phi.cols(); ++j) {
    if (!std::binary_search(support.begin(), support.end(), j)) incorrect = std::max(incorrect, mean(j));
  }
  return 0.5 * mean(model.gamma.jc) + 0.5 * incorrect;
}

TailEstimate theorem1_tail_estimate(const SensingMatrix& phi, const MatrixXd& x,
                                    const IndexSet& support, const NoiseSpec& noise,
                                    const IndexSet& subset, double alpha, std::uint64_t samples,
                                    Seed seed) {
  if (!(alpha > 0.0)) throw Error(Errc::InvalidArgument, "alpha must be positive");
  if (samples < 10'000) throw Error(Errc::InvalidArgument, "tail estimate needs at least 1e4 samples");
  if (noise.channels() != x.cols()) throw Error(Errc::DimensionMismatch, "noise length must equal K");
  const AtomModel model = atom_model(phi, x, support, subset);

  IndexSet incorrect;
  for (Index j = 0; j < phi.cols(); ++j) {
    if (!std::binary_search(support.begin(), support.end(), j)) incorrect.push_back(j);
  }
  const Index k = x.cols();
  // Only marginal probabilities enter the estimate, so all atoms share one draw of g.
  Engine engine(derive_seed(seed, Stream::Sampling));
  std::normal_distribution<double> normal;
  VectorXd g(k);
  const auto metric = [&](Index j) {
    double f = 0.0;
    for (Index c = 0; c < k; ++c) {
      f += std::abs(model.betas(j, c) + model.scale(j) * noise.sigma()(c) * g(c));
    }
    return f;
  };

  std::uint64_t low = 0;
  double exceed_sum = 0.0;
  double exceed_sq = 0.0;
  for (std::uint64_t draw = 0; draw < samples; ++draw) {
    for (Index c = 0; c < k; ++c) g(c) = normal(engine);
    if (metric(model.gamma.jc) <= alpha) ++low;
    double exceed = 0.0;
    for (Index j : incorrect) {
      if (metric(j) >= alpha) exceed += 1.0;
    }
    exceed_sum += exceed;
    exceed_sq += exceed * exceed;
  }
  const double count = static_cast<double>(samples);
  TailEstimate out;
  out.alpha = alpha;
  out.samples = samples;
  out.p_correct_low = static_cast<double>(low) / count;
  out.se_correct = std::sqrt(out.p_correct_low * (1.0 - out.p_correct_low) / count);
  out.p_incorrect_high = exceed_sum / count;
  const double var = std::max(0.0, exceed_sq / count - out.p_incorrect_high * out.p_incorrect_high);
  out.se_incorrect = std::sqrt(var / count);
  return out;
}

ProbabilityBound theorem2_bound(double delta_e_tp, const NoiseSpec& sigma, Index n,
                                Index support_size) {
  if (support_size < 1 || support_size > n) throw Error(Errc::InvalidArgument, "need 1 <= |S| <= n");
  const double ceiling = static_cast<double>(n - support_size + 1);
  ProbabilityBound out;
  out.valid = delta_e_tp > 0.0;
  if (!out.valid) {
    out.value = ceiling;
  } else {
    const double power = sigma.sigma().squaredNorm();
    out.value = ceiling * std::exp(-(delta_e_tp * delta_e_tp) / (8.0 * power));
  }
  out.vacuous = out.value >= 1.0;
  return out;
}

CsValue c_s(Index support_size, Index s) {
  if (s < 0 || support_size < 0 || s > support_size) {
    throw Error(Errc::InvalidArgument, "C_s requires 0 <= s <= |S|");
  }
  CsValue out;
  for (Index t = 0; t <= s; ++t) {
    const auto term = binomial(static_cast<std::uint64_t>(support_size), static_cast<std::uint64_t>(t));
    if (!term || __builtin_add_overflow(out.exact, *term, &out.exact)) {
      throw Error(Errc::CombinatorialBlowup, "C_s does not fit in 64 bits");
    }
  }
  if (s == 0) {
    out.upper = 1.0;
  } else {
    const double ds = static_cast<double>(s);
    out.upper = std::pow(std::numbers::e * (static_cast<double>(support_size) + ds - 1.0) / ds, ds) + 1.0;
  }
  return out;
}

double delta_e_global(double gamma, double psi, double tau_x, const NoiseSpec& sigma) {
  return gamma_factor(gamma) * psi * tau_x - kSqrtTwoOverPi * sigma.sigma().lpNorm<1>();
}

ProbabilityBound theorem3_bound(double delta_e, const NoiseSpec& sigma, Index n,
                                Index support_size, Index s) {
  const double ceiling = static_cast<double>(n) * static_cast<double>(c_s(support_size, s).exact);
  ProbabilityBound out;
  out.valid = delta_e > 0.0;
  if (!out.valid) {
    out.value = ceiling;
  } else {
    const double power = sigma.sigma().squaredNorm();
    out.value = ceiling * std::exp(-(delta_e * delta_e) / (8.0 * power));
  }
  out.vacuous = out.value >= 1.0;
  return out;
}

double xi(double gamma, double psi, double snr_min, double omega_sigma) {
  return gamma_factor(gamma) * psi * snr_min - kSqrtTwoOverPi * omega_sigma;
}

double k_min_theoretical(double xi_value, Index n, double c_s_value, double p_err) {
  if (!(xi_value > 0.0)) throw Error(Errc::NonpositiveXi, "K_min requires xi > 0");
  if (!(p_err > 0.0)) throw Error(Errc::InvalidArgument, "p_err must be positive");
  return 8.0 / (xi_value * xi_value) * std::log(static_cast<double>(n) * c_s_value / p_err);
}

BoundReport bound_report(const NoiselessProfile& profile, const JointSparseInstance& instance,
                         double p_err, bool with_exact_gap) {
  const Index size = static_cast<Index>(instance.support.size());
  BoundReport report;
  report.p_err = p_err;
  report.gamma = profile.gamma_exact.value;
  const CsValue cs = c_s(size, profile.s);
  report.c_s_exact = cs.exact;
  report.c_s_upper = cs.upper;

  if (with_exact_gap) {
    double gap = std::numeric_limits<double>::infinity();
    for (const auto& entry : profile.entries) {
      gap = std::min(gap, delta_e_exact(instance.phi, instance.x, instance.support, instance.noise,
                                        entry.subset));
    }
    report.delta_e_exact_min = gap;
  }

  std::optional<double> gap;
  if (report.gamma > 1.0) {
    gap = delta_e_global(report.gamma, profile.psi, profile.tau_x, instance.noise);
    report.delta_e_global = gap;
    const ModelSummary summary = summarize(instance);
    report.xi = xi(report.gamma, profile.psi, summary.snr, summary.omega_sigma);
    if (*report.xi > 0.0) {
      report.k_min_theoretical =
          k_min_theoretical(*report.xi, instance.n(), static_cast<double>(cs.exact), p_err);
    }
  }
  const ProbabilityBound bound =
      theorem3_bound(gap.value_or(0.0), instance.noise, instance.n(), size, profile.s);
  report.theorem3_bound = bound.value;
  report.valid = bound.valid;
  report.vacuous = bound.vacuous;
  return report;
}

}  // namespace somp
