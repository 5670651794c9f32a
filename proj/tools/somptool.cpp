// somptool: command-line front end for the SOMP library.
//
// Data goes to standard output (or --out); diagnostics go to standard error.
// Exit codes: 0 success, 2 configuration/validation, 3 I/O, 4 resource guard.

#include "somp/bounds.hpp"
#include "somp/error.hpp"
#include "somp/fit.hpp"
#include "somp/io.hpp"
#include "somp/monte_carlo.hpp"
#include "somp/noiseless.hpp"
#include "somp/signal_model.hpp"
#include "somp/solver.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace {

using namespace somp;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr int kExitGuard = 4;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::Io: return kExitIo;
    case Errc::CombinatorialBlowup: return kExitGuard;
    default: return kExitConfig;
  }
}

/// Flags shared by every subcommand.
struct Common {
  std::string config;
  std::optional<Seed> seed;
  std::optional<std::uint64_t> trials;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file (JSON)");
  cmd->add_option("--seed", c.seed, "override the configured seed");
  cmd->add_option("--trials", c.trials, "override the configured trial count")->check(CLI::PositiveNumber);
  cmd->add_option("--jobs", c.jobs, "worker threads (results do not depend on this)")->check(CLI::PositiveNumber);
  cmd->add_option("--out", c.out, "output path (default: standard output)");
}

void emit(const std::string& out_path, const std::string& text) {
  if (out_path.empty() || out_path == "-") {
    std::cout << text << std::flush;
  } else {
    write_text_file(out_path, text);
  }
}

std::string dump(const Json& doc) { return doc.dump(2) + "\n"; }

Json load_json(const std::string& path) { return parse_json(read_text_file(path), path); }

std::string require_path(const std::string& path, const char* what) {
  if (path.empty()) throw Error(Errc::Config, std::string("missing ") + what);
  return path;
}

// ---------------------------------------------------------------- gen

int cmd_gen(const Common& c, const std::string& csv_dir) {
  InstanceConfig config = instance_config_from_json(load_json(require_path(c.config, "--config")));
  if (c.seed) config.seed = *c.seed;
  const JointSparseInstance instance = build_instance(config);
  emit(c.out, dump(instance_to_json(instance, config)));
  if (!csv_dir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(csv_dir, ec);
    if (ec) throw Error(Errc::Io, "cannot create directory '" + csv_dir + "'");
    const std::filesystem::path dir(csv_dir);
    write_text_file((dir / "phi.csv").string(), matrix_to_csv(instance.phi.matrix()));
    write_text_file((dir / "x.csv").string(), matrix_to_csv(instance.x));
    write_text_file((dir / "y.csv").string(), matrix_to_csv(instance.y));
  }
  return kExitOk;
}

// ---------------------------------------------------------------- somp

int cmd_somp(const Common& c, const std::string& instance_path, std::optional<Index> iterations) {
  const JointSparseInstance instance = instance_from_json(load_json(require_path(instance_path, "instance path")));
  const Index passes = iterations.value_or(static_cast<Index>(instance.support.size()));
  if (passes < 1) throw Error(Errc::Config, "iterations must be >= 1 (the instance support is empty)");
  const auto trace = simultaneous_omp(instance.y, instance.phi, passes);
  emit(c.out, dump(trace_to_json(trace)));
  return kExitOk;
}

// ---------------------------------------------------------------- analyze

int cmd_analyze(const Common& c, const std::string& instance_path, std::optional<Index> s_flag, double p_err,
                const std::string& params_path, std::uint64_t guard) {
  const JointSparseInstance instance = instance_from_json(load_json(require_path(instance_path, "instance path")));
  const Index size = static_cast<Index>(instance.support.size());
  if (size < 1) throw Error(Errc::Config, "analysis needs a nonempty support");
  const Index s = s_flag.value_or(size - 1);
  if (s < 0 || s >= size) {
    throw Error(Errc::Config, "s must satisfy 0 <= s < |S| = " + std::to_string(size));
  }
  if (!(p_err > 0.0 && p_err < 1.0)) throw Error(Errc::Config, "--p-err must lie in (0,1)");
  ProfileOptions options;
  options.guard = guard;
  const NoiselessProfile profile = compute_profile(instance.phi, instance.x, instance.support, s, options);
  const BoundReport report = bound_report(profile, instance, p_err);

  Json bounds = bound_report_to_json(report);
  if (!params_path.empty()) {
    const FitParams params = fit_params_from_json(load_json(params_path));
    const ModelSummary summary = summarize(instance);
    try {
      bounds["k_min_fitted"] = number_or_tag(predict_kmin(params, summary.snr, summary.omega_sigma, p_err));
    } catch (const Error& e) {
      std::cerr << "somptool analyze: fitted K_min unavailable: " << e.what() << "\n";
      bounds["k_min_fitted"] = nullptr;
    }
  }
  emit(c.out, dump(Json{{"profile", profile_to_json(profile)}, {"bounds", bounds}}));
  return kExitOk;
}

// ---------------------------------------------------------------- sweep / kmin

ExperimentConfig load_experiment(const Common& c) {
  ExperimentConfig config = experiment_config_from_json(load_json(require_path(c.config, "--config")));
  if (c.seed) config.trial.master_seed = *c.seed;
  if (c.trials) config.trials = *c.trials;
  return config;
}

std::string output_path(const Common& c, const ExperimentConfig& config) {
  if (!c.out.empty()) return c.out;
  return config.output.value_or("");
}

int cmd_sweep(const Common& c) {
  const ExperimentConfig config = load_experiment(c);
  const auto rows = sweep(make_grid(config.snr, config.k, config.r_sigma), config.trials, config.trial, c.jobs);
  emit(output_path(c, config), sweep_to_csv(rows));
  int status = kExitOk;
  for (const SweepRow& row : rows) {
    if (!row.error) continue;
    std::cerr << "somptool sweep: cell (snr=" << row.cell.snr << ", k=" << row.cell.k
              << ", r_sigma=" << row.cell.r_sigma << ") failed: " << *row.error << "\n";
    status = kExitConfig;
  }
  return status;
}

int cmd_kmin(const Common& c) {
  const ExperimentConfig config = load_experiment(c);
  const KminSettings& km = config.kmin;
  FitDataset dataset;
  int status = kExitOk;
  for (double snr : config.snr) {
    for (double r : config.r_sigma) {
      PfailCurve curve(config.trial, snr, r, config.trials, c.jobs);
      for (double p : km.p_err) {
        try {
          const Index k = empirical_kmin(curve, p, km.k_lo, km.k_hi, km.step, km.method);
          dataset.push_back(FitRow{p, snr, omega_sigma(unit_mean_alternating_sigma(r, k)), static_cast<double>(k)});
        } catch (const Error& e) {
          if (e.code() != Errc::NotFound) throw;
          std::cerr << "somptool kmin: (snr=" << snr << ", r_sigma=" << r << ", p_err=" << p << "): " << e.what()
                    << "\n";
          status = kExitConfig;
        }
      }
    }
  }
  emit(output_path(c, config), fit_dataset_to_csv(dataset));
  return status;
}

// ---------------------------------------------------------------- fit / predict

struct FitFlags {
  std::string dataset;
  std::size_t points = 500;
  std::string mode = "full";
  std::size_t coarse_points = 50;
  std::vector<double> alpha_range;
  std::vector<double> beta_range;
  std::vector<double> gamma_range;
};

int cmd_fit(const Common& c, const FitFlags& f) {
  const std::string path = !f.dataset.empty() ? f.dataset : c.config;
  const FitDataset dataset = fit_dataset_from_csv(read_text_file(require_path(path, "dataset path")), path);
  FitGrid grid = FitGrid::paper_default();
  for (GridAxis* axis : {&grid.alpha, &grid.beta, &grid.gamma}) axis->points = f.points;
  const auto apply = [](GridAxis& axis, const std::vector<double>& range) {
    if (range.empty()) return;
    axis.lo = range[0];
    axis.hi = range[1];
  };
  apply(grid.alpha, f.alpha_range);
  apply(grid.beta, f.beta_range);
  apply(grid.gamma, f.gamma_range);
  if (f.mode == "full") {
    grid.mode = FitMode::Full;
  } else if (f.mode == "coarse_to_fine") {
    grid.mode = FitMode::CoarseToFine;
    grid.coarse_points = f.coarse_points;
  } else {
    throw Error(Errc::Config, "--mode must be 'full' or 'coarse_to_fine'");
  }
  emit(c.out, dump(fit_result_to_json(grid_fit(dataset, grid, c.jobs))));
  return kExitOk;
}

int cmd_predict(const Common& c, const std::string& params_path, double snr, double omega, double p_err) {
  const std::string path = !params_path.empty() ? params_path : c.config;
  const FitParams params = fit_params_from_json(load_json(require_path(path, "--params")));
  emit(c.out, format_double(predict_kmin(params, snr, omega, p_err)) + "\n");
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"SOMP recovery, noiseless analysis, failure bounds and Monte-Carlo experiments"};
  app.require_subcommand(1);

  Common common;
  std::string csv_dir;
  std::string instance_path;
  std::optional<Index> iterations;
  std::optional<Index> s_flag;
  double p_err = 0.05;
  std::string params_path;
  std::uint64_t guard = kDefaultCombinationGuard;
  FitFlags fit_flags;
  double snr = 0, omega = 1;

  auto* gen = app.add_subcommand("gen", "generate an instance from a JSON recipe");
  add_common(gen, common);
  gen->add_option("--csv-dir", csv_dir, "also write phi.csv, x.csv and y.csv into this directory");

  auto* somp_cmd = app.add_subcommand("somp", "run SOMP on an instance and print the trace");
  add_common(somp_cmd, common);
  somp_cmd->add_option("instance", instance_path, "instance JSON")->required();
  somp_cmd->add_option("--iterations", iterations, "number of passes (default |S|)");

  auto* analyze = app.add_subcommand("analyze", "noiseless profile and failure bounds");
  add_common(analyze, common);
  analyze->add_option("instance", instance_path, "instance JSON")->required();
  analyze->add_option("--s", s_flag, "last iteration covered by the bound (default |S|-1)");
  analyze->add_option("--p-err", p_err, "target failure probability for K_min");
  analyze->add_option("--params", params_path, "fitted parameters; adds the model K_min");
  analyze->add_option("--guard", guard, "maximum number of enumerated subsets");

  auto* sweep_cmd = app.add_subcommand("sweep", "Monte-Carlo failure rates over an (snr, k, r_sigma) grid");
  add_common(sweep_cmd, common);

  auto* kmin = app.add_subcommand("kmin", "empirical K_min level sets as a fit dataset");
  add_common(kmin, common);

  auto* fit = app.add_subcommand("fit", "grid-search the K_min model parameters");
  add_common(fit, common);
  fit->add_option("dataset", fit_flags.dataset, "fit dataset CSV (or --config)");
  fit->add_option("--points", fit_flags.points, "grid points per axis")->check(CLI::PositiveNumber);
  fit->add_option("--mode", fit_flags.mode, "full or coarse_to_fine");
  fit->add_option("--coarse-points", fit_flags.coarse_points, "per-axis points of each coarse-to-fine stage");
  fit->add_option("--alpha-range", fit_flags.alpha_range, "alpha interval LO HI")->expected(2);
  fit->add_option("--beta-range", fit_flags.beta_range, "beta interval LO HI")->expected(2);
  fit->add_option("--gamma-range", fit_flags.gamma_range, "gamma interval LO HI")->expected(2);

  auto* predict = app.add_subcommand("predict", "evaluate the fitted K_min model");
  add_common(predict, common);
  predict->add_option("--params", params_path, "fit result JSON (or --config)");
  predict->add_option("--snr", snr, "minimum SNR")->required();
  predict->add_option("--omega", omega, "noise flatness omega_sigma");
  predict->add_option("--p-err", p_err, "target failure probability")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gen->parsed()) return cmd_gen(common, csv_dir);
    if (somp_cmd->parsed()) return cmd_somp(common, instance_path, iterations);
    if (analyze->parsed()) return cmd_analyze(common, instance_path, s_flag, p_err, params_path, guard);
    if (sweep_cmd->parsed()) return cmd_sweep(common);
    if (kmin->parsed()) return cmd_kmin(common);
    if (fit->parsed()) return cmd_fit(common, fit_flags);
    if (predict->parsed()) return cmd_predict(common, params_path, snr, omega, p_err);
  } catch (const Error& e) {
    std::cerr << "somptool: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "somptool: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}
