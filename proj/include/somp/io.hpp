#pragma once

// JSON and CSV serialisation of instances, traces, analysis reports,
// experiment configurations, sweep tables and fit artefacts.
//
// Parsing errors raise Error(Config); file-system errors raise Error(Io).
// Unknown keys in configuration documents are rejected.

#include "somp/bounds.hpp"
#include "somp/fit.hpp"
#include "somp/monte_carlo.hpp"
#include "somp/noiseless.hpp"
#include "somp/signal_model.hpp"
#include "somp/solver.hpp"

#include <json.hpp>

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace somp {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------- files

std::string read_text_file(const std::string& path);
/// Writes atomically enough for our purposes: truncate, write, check stream.
void write_text_file(const std::string& path, const std::string& text);
Json parse_json(const std::string& text, const std::string& origin);

/// Rounds to `digits` significant digits (used for report scalars).
double round_significant(double value, int digits = 12);

/// Finite values become numbers; +-inf and NaN become the strings "inf",
/// "-inf" and "nan".
Json number_or_tag(double value, int digits = 12);

// ---------------------------------------------------------------- instances

enum class MatrixKind { Hypersphere, Identity };

/// Generator recipe for one instance; regenerating from it is bit-identical.
struct InstanceConfig {
  Index m = 0;
  Index n = 0;
  Index k = 1;
  Index support_size = 0;
  double mu_x = 1.0;
  NoiseDescriptor noise;
  MatrixKind matrix_kind = MatrixKind::Hypersphere;
  Seed matrix_seed = 0;
  Seed seed = 0;
  std::optional<IndexSet> support;  ///< fixed support instead of a random draw
};

InstanceConfig instance_config_from_json(const Json& doc);
Json instance_config_to_json(const InstanceConfig& config);

/// Throws Error(Config) naming the violated constraint.
JointSparseInstance build_instance(const InstanceConfig& config);

/// Full instance document: the explicit data (phi, x, e, y, sigma, support)
/// plus the generator recipe when known. Numbers use shortest round-trip form,
/// so loading reproduces every entry exactly.
Json instance_to_json(const JointSparseInstance& instance,
                      const std::optional<InstanceConfig>& recipe = std::nullopt);
JointSparseInstance instance_from_json(const Json& doc);

Json matrix_to_json(const MatrixXd& a);
MatrixXd matrix_from_json(const Json& rows, const std::string& what);

/// Comma-separated rows, 17 significant digits.
std::string matrix_to_csv(const MatrixXd& a);

// ---------------------------------------------------------------- analysis

Json trace_to_json(const SompTrace<double>& trace);
Json profile_to_json(const NoiselessProfile& profile);
Json bound_report_to_json(const BoundReport& report);

// ---------------------------------------------------------------- experiments

struct KminSettings {
  std::vector<double> p_err{0.05, 0.5, 0.9};
  Index k_lo = 1;
  Index k_hi = 256;
  Index step = 1;
  KminMethod method = KminMethod::Bisection;
};

struct ExperimentConfig {
  TrialConfig trial;  ///< template; k, mu_x and noise are set per grid cell
  std::vector<double> snr;
  std::vector<Index> k;
  std::vector<double> r_sigma;
  std::uint64_t trials = 1000;
  KminSettings kmin;
  std::optional<std::string> output;
};

ExperimentConfig experiment_config_from_json(const Json& doc);
Json experiment_config_to_json(const ExperimentConfig& config);

inline constexpr const char* kSweepCsvHeader = "snr,k,r_sigma,trials,failures,p_fail,ci_low,ci_high";
inline constexpr const char* kFitCsvHeader = "p_err,snr_min,omega_sigma,k_min";

/// Rows whose cell failed are written with empty result fields; the error is
/// reported separately by the caller.
std::string sweep_to_csv(const std::vector<SweepRow>& rows);

std::string fit_dataset_to_csv(const FitDataset& dataset);
FitDataset fit_dataset_from_csv(const std::string& text, const std::string& origin);

Json fit_result_to_json(const FitResult& result);
/// Accepts either a full fit result or a bare {"alpha","beta","gamma"} object.
FitParams fit_params_from_json(const Json& doc);

/// Shortest round-trip decimal form of a double.
std::string format_double(double value);

}  // namespace somp
