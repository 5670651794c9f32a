#include "somp/monte_carlo.hpp"

#include "somp/error.hpp"
#include "somp/linalg.hpp"
#include "somp/parallel.hpp"
#include "somp/rng.hpp"
#include "somp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace somp {

namespace {

bool contains(const IndexSet& sorted, Index j) {
  return std::binary_search(sorted.begin(), sorted.end(), j);
}

TrialOutcome classify(const IndexSet& selected, const IndexSet& support) {
  TrialOutcome out;
  for (std::size_t t = 0; t < selected.size(); ++t) {
    if (!contains(support, selected[t])) {
      out.first_error_iteration = static_cast<Index>(t);
      return out;
    }
  }
  out.success = true;
  return out;
}

template <class TrialFn>
McResult count_failures(std::uint64_t trials, unsigned jobs, TrialFn&& failed) {
  if (trials < 1) throw Error(Errc::InvalidArgument, "need at least one trial");
  std::vector<unsigned char> outcome(trials, 0);
  parallel_for(trials, jobs, [&](std::size_t i) { outcome[i] = failed(i) ? 1 : 0; });
  std::uint64_t failures = 0;
  for (unsigned char f : outcome) failures += f;
  return make_result(failures, trials);
}

}  // namespace

NoiseSpec NoiseDescriptor::realize(Index k) const {
  if (explicit_sigma) {
    if (explicit_sigma->size() != k) throw Error(Errc::Config, "explicit sigma length must equal k");
    return NoiseSpec(*explicit_sigma);
  }
  return alternating_sigma(sigma_odd, r_sigma, k);
}

void validate(const TrialConfig& c) {
  const auto fail = [](const std::string& what) { throw Error(Errc::Config, what); };
  if (c.m < 1) fail("m must be >= 1");
  if (c.n < c.m) fail("m must not exceed n");
  if (c.support_size < 1) fail("support_size must be >= 1");
  if (c.support_size > c.m) fail("support_size must not exceed m");
  if (c.k < 1) fail("k must be >= 1");
  if (!std::isfinite(c.mu_x) || c.mu_x < 0.0) fail("mu_x must be finite and nonnegative");
  if (c.noise.explicit_sigma) {
    if (c.noise.explicit_sigma->size() != c.k) fail("explicit sigma length must equal k");
  } else if (!(c.noise.sigma_odd >= 0.0) || !(c.noise.r_sigma >= 0.0)) {
    fail("sigma_odd and r_sigma must be nonnegative");
  }
}

WilsonInterval wilson_interval(std::uint64_t failures, std::uint64_t trials, double z) {
  if (trials == 0) throw Error(Errc::InvalidArgument, "Wilson interval needs trials >= 1");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(failures) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / denom;
  const double half = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

double McResult::standard_error() const {
  const double n = static_cast<double>(trials);
  const double z2 = kWilsonZ95 * kWilsonZ95;
  return std::sqrt(p_fail * (1.0 - p_fail) / n + z2 / (4.0 * n * n)) / (1.0 + z2 / n);
}

McResult make_result(std::uint64_t failures, std::uint64_t trials) {
  if (failures > trials) throw Error(Errc::InvalidArgument, "failures exceed trials");
  const WilsonInterval ci = wilson_interval(failures, trials);
  McResult out;
  out.trials = trials;
  out.failures = failures;
  out.p_fail = static_cast<double>(failures) / static_cast<double>(trials);
  out.ci_low = std::min(ci.low, out.p_fail);
  out.ci_high = std::max(ci.high, out.p_fail);
  return out;
}

Experiment::Experiment(TrialConfig config) : config_(std::move(config)) {
  validate(config_);
  if (!config_.fresh_matrix) phi_ = sample_sensing_matrix(config_.m, config_.n, config_.matrix_seed);
}

const SensingMatrix& Experiment::fixed_matrix() const {
  if (!phi_) throw Error(Errc::InvalidArgument, "experiment resamples its matrix per trial");
  return *phi_;
}

TrialOutcome Experiment::run_trial(std::uint64_t index) const {
  const Seed seed = trial_seed(config_.master_seed, index);
  const NoiseSpec noise = config_.noise.realize(config_.k);
  const auto run = [&](const SensingMatrix& phi) {
    const JointSparseInstance inst =
        generate_instance(phi, config_.support_size, config_.k, config_.mu_x, noise, seed);
    const auto trace = simultaneous_omp(inst.y, phi, config_.support_size);
    return classify(trace.selected, inst.support);
  };
  if (phi_) return run(*phi_);
  return run(sample_sensing_matrix(config_.m, config_.n, seed));
}

McResult Experiment::estimate_pfail(std::uint64_t trials, unsigned jobs) const {
  return count_failures(trials, jobs, [&](std::size_t i) { return !run_trial(i).success; });
}

TrialOutcome run_trial(const TrialConfig& config, std::uint64_t trial_index) {
  return Experiment(config).run_trial(trial_index);
}

McResult estimate_pfail(const TrialConfig& config, std::uint64_t trials, unsigned jobs) {
  return Experiment(config).estimate_pfail(trials, jobs);
}

McResult estimate_pfail_fixed_signal(const SensingMatrix& phi, const MatrixXd& x,
                                     const IndexSet& support, const NoiseSpec& noise,
                                     Index iterations, std::uint64_t trials, Seed seed,
                                     unsigned jobs) {
  if (x.rows() != phi.cols() || noise.channels() != x.cols()) {
    throw Error(Errc::DimensionMismatch, "fixed-signal trials: X must be n x K and sigma of length K");
  }
  const MatrixXd signal = phi.matrix() * x;
  return count_failures(trials, jobs, [&](std::size_t i) {
    const MatrixXd y = signal + sample_noise(phi.rows(), noise, trial_seed(seed, i));
    const auto trace = simultaneous_omp(y, phi, iterations);
    return !classify(trace.selected, support).success;
  });
}

McResult estimate_one_iteration_failure(const SensingMatrix& phi, const MatrixXd& x,
                                        const IndexSet& support, const NoiseSpec& noise,
                                        const IndexSet& subset, std::uint64_t trials, Seed seed,
                                        unsigned jobs) {
  if (x.rows() != phi.cols() || noise.channels() != x.cols()) {
    throw Error(Errc::DimensionMismatch, "one-iteration trials: X must be n x K and sigma of length K");
  }
  const MatrixXd signal = phi.matrix() * x;
  const MatrixXd complement =
      subset.empty() ? MatrixXd::Identity(phi.rows(), phi.rows()).eval()
                     : (MatrixXd::Identity(phi.rows(), phi.rows()) -
                        orthogonal_projector(select_columns(phi.matrix(), subset)))
                           .eval();
  return count_failures(trials, jobs, [&](std::size_t i) {
    const MatrixXd residual =
        complement * (signal + sample_noise(phi.rows(), noise, trial_seed(seed, i)));
    return !contains(support, argmax_lowest(selection_metric(residual, phi)));
  });
}

TrialConfig cell_config(const TrialConfig& base, const GridCell& cell) {
  TrialConfig out = base;
  out.k = cell.k;
  out.mu_x = cell.snr;
  const NoiseSpec unit = unit_mean_alternating_sigma(cell.r_sigma, cell.k);
  out.noise = NoiseDescriptor{};
  out.noise.sigma_odd = unit.sigma()(0);
  out.noise.r_sigma = cell.r_sigma;
  return out;
}

std::vector<GridCell> make_grid(const std::vector<double>& snr, const std::vector<Index>& k,
                                const std::vector<double>& r_sigma) {
  std::vector<GridCell> grid;
  for (double s : snr) {
    for (Index kk : k) {
      for (double r : r_sigma) grid.push_back(GridCell{s, kk, r});
    }
  }
  return grid;
}

std::vector<SweepRow> sweep(const std::vector<GridCell>& grid, std::uint64_t trials,
                            const TrialConfig& base, unsigned jobs) {
  if (grid.empty()) throw Error(Errc::Config, "sweep grid is empty");
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  // Cells share the template's matrix_seed, hence the same fixed matrix.
  for (const GridCell& cell : grid) {
    SweepRow row;
    row.cell = cell;
    try {
      Experiment experiment(cell_config(base, cell));
      row.result = experiment.estimate_pfail(trials, jobs);
    } catch (const Error& e) {
      row.error = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PfailCurve::PfailCurve(TrialConfig base, double snr, double r_sigma, std::uint64_t trials,
                       unsigned jobs)
    : base_(std::move(base)), snr_(snr), r_sigma_(r_sigma), trials_(trials), jobs_(jobs) {
  validate(base_);
}

const McResult& PfailCurve::at(Index k) {
  auto it = cache_.find(k);
  if (it != cache_.end()) return it->second;
  const McResult result =
      estimate_pfail(cell_config(base_, GridCell{snr_, k, r_sigma_}), trials_, jobs_);
  return cache_.emplace(k, result).first->second;
}

Index empirical_kmin(PfailCurve& curve, double p_err, Index k_lo, Index k_hi, Index step,
                     KminMethod method) {
  if (k_lo < 1 || k_hi < k_lo) throw Error(Errc::InvalidArgument, "K range must satisfy 1 <= k_lo <= k_hi");
  if (step < 1) throw Error(Errc::InvalidArgument, "K step must be >= 1");
  const Index count = (k_hi - k_lo) / step + 1;
  const auto k_at = [&](Index i) { return k_lo + i * step; };
  const auto ok = [&](Index i) { return curve.at(k_at(i)).p_fail <= p_err; };
  const auto not_found = [&]() -> Index {
    throw Error(Errc::NotFound, "no K in [" + std::to_string(k_lo) + ", " + std::to_string(k_hi) +
                                    "] reaches p_fail <= " + std::to_string(p_err));
  };

  if (method == KminMethod::LinearScan) {
    for (Index i = 0; i < count; ++i) {
      if (ok(i)) return k_at(i);
    }
    return not_found();
  }
  if (ok(0)) return k_lo;
  if (!ok(count - 1)) return not_found();
  Index bad = 0;
  Index good = count - 1;
  while (good - bad > 1) {
    const Index mid = bad + (good - bad) / 2;
    (ok(mid) ? good : bad) = mid;
  }
  return k_at(good);
}

}  // namespace somp
