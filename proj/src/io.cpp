#include "somp/io.hpp"

#include "somp/error.hpp"
#include "somp/linalg.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

namespace somp {

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(Errc::Config, what); }

void require_object(const Json& doc, const std::string& where) {
  if (!doc.is_object()) config_error(where + ": expected a JSON object");
}

void reject_unknown_keys(const Json& doc, std::initializer_list<const char*> allowed,
                         const std::string& where) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& item : doc.items()) {
    if (!known.count(item.key())) config_error(where + ": unknown key '" + item.key() + "'");
  }
}

const Json& required(const Json& doc, const char* key, const std::string& where) {
  const auto it = doc.find(key);
  if (it == doc.end()) config_error(where + ": missing key '" + key + "'");
  return *it;
}

double as_real(const Json& v, const std::string& what) {
  if (!v.is_number()) config_error(what + " must be a number");
  return v.get<double>();
}

Index as_count(const Json& v, const std::string& what) {
  if (!v.is_number_integer()) config_error(what + " must be an integer");
  if (v.is_number_unsigned()) {
    const auto u = v.get<std::uint64_t>();
    if (u > static_cast<std::uint64_t>(std::numeric_limits<Index>::max())) config_error(what + " is too large");
    return static_cast<Index>(u);
  }
  const auto i = v.get<std::int64_t>();
  if (i < 0) config_error(what + " must be nonnegative");
  return static_cast<Index>(i);
}

Seed as_seed(const Json& v, const std::string& what) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<Seed>(v.get<std::int64_t>());
  config_error(what + " must be a nonnegative 64-bit integer");
}

bool as_bool(const Json& v, const std::string& what) {
  if (!v.is_boolean()) config_error(what + " must be true or false");
  return v.get<bool>();
}

std::string as_string(const Json& v, const std::string& what) {
  if (!v.is_string()) config_error(what + " must be a string");
  return v.get<std::string>();
}

template <class T, class Convert>
std::vector<T> as_list(const Json& v, const std::string& what, Convert convert) {
  if (!v.is_array()) config_error(what + " must be an array");
  std::vector<T> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(convert(v[i], what + "[" + std::to_string(i) + "]"));
  return out;
}

VectorXd as_vector(const Json& v, const std::string& what) {
  const auto values = as_list<double>(v, what, as_real);
  return Eigen::Map<const VectorXd>(values.data(), static_cast<Index>(values.size()));
}

IndexSet as_index_set(const Json& v, const std::string& what) { return as_list<Index>(v, what, as_count); }

Json index_list(const IndexSet& s) {
  Json out = Json::array();
  for (Index j : s) out.push_back(j);
  return out;
}

Json vector_to_json(const VectorXd& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

std::string matrix_kind_name(MatrixKind kind) {
  return kind == MatrixKind::Identity ? "identity" : "hypersphere";
}

Json noise_descriptor_to_json(const NoiseDescriptor& noise) {
  if (noise.explicit_sigma) return Json{{"sigma", vector_to_json(*noise.explicit_sigma)}};
  return Json{{"sigma_odd", noise.sigma_odd}, {"r_sigma", noise.r_sigma}};
}

NoiseDescriptor noise_descriptor_from_json(const Json& doc, const std::string& where) {
  require_object(doc, where);
  NoiseDescriptor out;
  if (doc.contains("sigma")) {
    reject_unknown_keys(doc, {"sigma"}, where);
    out.explicit_sigma = as_vector(doc["sigma"], where + ".sigma");
    return out;
  }
  reject_unknown_keys(doc, {"sigma_odd", "r_sigma"}, where);
  if (doc.contains("sigma_odd")) out.sigma_odd = as_real(doc["sigma_odd"], where + ".sigma_odd");
  if (doc.contains("r_sigma")) out.r_sigma = as_real(doc["r_sigma"], where + ".r_sigma");
  return out;
}

std::string method_name(KminMethod method) {
  return method == KminMethod::Bisection ? "bisection" : "linear";
}

Json grid_axis_to_json(const GridAxis& axis) {
  return Json{{"lo", axis.lo}, {"hi", axis.hi}, {"points", axis.points}};
}

Json fit_grid_to_json(const FitGrid& grid) {
  Json out{{"alpha", grid_axis_to_json(grid.alpha)},
           {"beta", grid_axis_to_json(grid.beta)},
           {"gamma", grid_axis_to_json(grid.gamma)},
           {"mode", to_string(grid.mode)}};
  if (grid.mode == FitMode::CoarseToFine) out["coarse_points"] = grid.coarse_points;
  return out;
}

double parse_csv_real(const std::string& field, const std::string& where) {
  double value = 0;
  const char* first = field.data();
  const char* last = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) config_error(where + ": '" + field + "' is not a number");
  return value;
}

}  // namespace

// ---------------------------------------------------------------- files

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open '" + path + "' for reading");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw Error(Errc::Io, "failed reading '" + path + "'");
  return buffer.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::Io, "cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw Error(Errc::Io, "failed writing '" + path + "'");
}

Json parse_json(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    config_error(origin + ": malformed JSON (" + e.what() + ")");
  }
}

double round_significant(double value, int digits) {
  if (!std::isfinite(value) || value == 0.0) return value;
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*g", digits, value);
  return std::strtod(buffer, nullptr);
}

Json number_or_tag(double value, int digits) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return round_significant(value, digits);
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
  return std::string(buffer, ptr);
}

// ---------------------------------------------------------------- instances

InstanceConfig instance_config_from_json(const Json& doc) {
  const std::string where = "instance config";
  require_object(doc, where);
  reject_unknown_keys(doc, {"m", "n", "k", "support_size", "mu_x", "noise", "matrix", "matrix_seed", "seed", "support"},
                      where);
  InstanceConfig c;
  c.m = as_count(required(doc, "m", where), "m");
  c.n = as_count(required(doc, "n", where), "n");
  c.k = as_count(required(doc, "k", where), "k");
  if (doc.contains("support")) {
    c.support = as_index_set(doc["support"], "support");
    c.support_size = static_cast<Index>(c.support->size());
    if (doc.contains("support_size") && as_count(doc["support_size"], "support_size") != c.support_size) {
      config_error("support_size must equal the length of support");
    }
  } else {
    c.support_size = as_count(required(doc, "support_size", where), "support_size");
  }
  if (doc.contains("mu_x")) c.mu_x = as_real(doc["mu_x"], "mu_x");
  if (doc.contains("noise")) c.noise = noise_descriptor_from_json(doc["noise"], "noise");
  if (doc.contains("matrix")) {
    const std::string kind = as_string(doc["matrix"], "matrix");
    if (kind == "hypersphere") {
      c.matrix_kind = MatrixKind::Hypersphere;
    } else if (kind == "identity") {
      c.matrix_kind = MatrixKind::Identity;
    } else {
      config_error("matrix must be 'hypersphere' or 'identity'");
    }
  }
  if (doc.contains("matrix_seed")) c.matrix_seed = as_seed(doc["matrix_seed"], "matrix_seed");
  if (doc.contains("seed")) c.seed = as_seed(doc["seed"], "seed");
  return c;
}

Json instance_config_to_json(const InstanceConfig& c) {
  Json out{{"m", c.m},
           {"n", c.n},
           {"k", c.k},
           {"support_size", c.support_size},
           {"mu_x", c.mu_x},
           {"noise", noise_descriptor_to_json(c.noise)},
           {"matrix", matrix_kind_name(c.matrix_kind)},
           {"matrix_seed", c.matrix_seed},
           {"seed", c.seed}};
  if (c.support) out["support"] = index_list(*c.support);
  return out;
}

JointSparseInstance build_instance(const InstanceConfig& c) {
  if (c.m < 1) config_error("m must be >= 1");
  if (c.n < c.m) config_error("m must not exceed n");
  if (c.k < 1) config_error("k must be >= 1");
  if (c.support_size < 1) config_error("support_size must be >= 1");
  if (c.support_size > c.m) config_error("support_size must not exceed m");
  if (c.matrix_kind == MatrixKind::Identity && c.n != c.m) config_error("identity matrix requires n == m");
  if (!std::isfinite(c.mu_x)) config_error("mu_x must be finite");
  try {
    const NoiseSpec noise = c.noise.realize(c.k);
    const SensingMatrix phi = c.matrix_kind == MatrixKind::Identity ? identity_sensing_matrix(c.m)
                                                                    : sample_sensing_matrix(c.m, c.n, c.matrix_seed);
    if (c.support) return generate_instance_with_support(phi, *c.support, c.k, c.mu_x, noise, c.seed);
    return generate_instance(phi, c.support_size, c.k, c.mu_x, noise, c.seed);
  } catch (const Error& e) {
    if (e.code() == Errc::Io) throw;
    config_error(e.what());
  }
}

Json matrix_to_json(const MatrixXd& a) {
  Json rows = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Index j = 0; j < a.cols(); ++j) row.push_back(a(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

MatrixXd matrix_from_json(const Json& rows, const std::string& what) {
  if (!rows.is_array() || rows.empty()) config_error(what + " must be a nonempty array of rows");
  const std::size_t cols = rows[0].is_array() ? rows[0].size() : 0;
  if (cols == 0) config_error(what + " rows must be nonempty arrays");
  MatrixXd a(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) config_error(what + " is not rectangular");
    for (std::size_t j = 0; j < cols; ++j) {
      a(static_cast<Index>(i), static_cast<Index>(j)) = as_real(rows[i][j], what + " entry");
    }
  }
  return a;
}

std::string matrix_to_csv(const MatrixXd& a) {
  std::string out;
  char buffer[64];
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      std::snprintf(buffer, sizeof buffer, "%.17g", a(i, j));
      if (j > 0) out += ',';
      out += buffer;
    }
    out += '\n';
  }
  return out;
}

Json instance_to_json(const JointSparseInstance& inst, const std::optional<InstanceConfig>& recipe) {
  Json out{{"m", inst.m()},
           {"n", inst.n()},
           {"k", inst.k()},
           {"support", index_list(inst.support)},
           {"sigma", vector_to_json(inst.noise.sigma())}};
  if (recipe) out["generator"] = instance_config_to_json(*recipe);
  out["phi"] = matrix_to_json(inst.phi.matrix());
  out["x"] = matrix_to_json(inst.x);
  out["e"] = matrix_to_json(inst.e);
  out["y"] = matrix_to_json(inst.y);
  return out;
}

JointSparseInstance instance_from_json(const Json& doc) {
  const std::string where = "instance";
  require_object(doc, where);
  reject_unknown_keys(doc, {"m", "n", "k", "support", "sigma", "generator", "phi", "x", "e", "y"}, where);
  if (!doc.contains("phi")) {
    // Recipe-only document.
    if (!doc.contains("generator")) config_error("instance needs either explicit data or a generator");
    return build_instance(instance_config_from_json(doc["generator"]));
  }
  try {
    const SensingMatrix phi(matrix_from_json(doc["phi"], "phi"));
    MatrixXd x = matrix_from_json(required(doc, "x", where), "x");
    if (x.rows() != phi.cols()) config_error("x must have n rows");
    const Index k = x.cols();
    const NoiseSpec noise = doc.contains("sigma") ? NoiseSpec(as_vector(doc["sigma"], "sigma"))
                                                  : NoiseSpec(VectorXd::Zero(k));
    if (noise.channels() != k) config_error("sigma length must equal the number of columns of x");
    MatrixXd e = doc.contains("e") ? matrix_from_json(doc["e"], "e") : MatrixXd::Zero(phi.rows(), k);
    if (e.rows() != phi.rows() || e.cols() != k) config_error("e must be m x K");

    IndexSet support;
    if (doc.contains("support")) {
      support = as_index_set(doc["support"], "support");
      if (!std::is_sorted(support.begin(), support.end()) ||
          std::adjacent_find(support.begin(), support.end()) != support.end() ||
          (!support.empty() && (support.front() < 0 || support.back() >= phi.cols()))) {
        config_error("support must be sorted, distinct and within [0, n)");
      }
      for (Index j = 0; j < x.rows(); ++j) {
        if (!x.row(j).isZero(0.0) && !std::binary_search(support.begin(), support.end(), j)) {
          config_error("x has a nonzero row outside the support");
        }
      }
    } else {
      for (Index j = 0; j < x.rows(); ++j) {
        if (!x.row(j).isZero(0.0)) support.push_back(j);
      }
    }
    MatrixXd y;
    if (doc.contains("y")) {
      y = matrix_from_json(doc["y"], "y");
      if (y.rows() != phi.rows() || y.cols() != k) config_error("y must be m x K");
    } else {
      y = (support.empty() ? MatrixXd::Zero(phi.rows(), k).eval()
                           : (select_columns(phi.matrix(), support) *
                              select_rows(x, support))
                                 .eval()) +
          e;
    }
    for (const char* key : {"m", "n", "k"}) {
      if (!doc.contains(key)) continue;
      const Index declared = as_count(doc[key], key);
      const Index actual = key[0] == 'm' ? phi.rows() : key[0] == 'n' ? phi.cols() : k;
      if (declared != actual) config_error(std::string(key) + " disagrees with the data");
    }
    return JointSparseInstance{phi, std::move(support), std::move(x), noise, std::move(y), std::move(e)};
  } catch (const Error& e) {
    if (e.code() == Errc::Config) throw;
    config_error(std::string("instance: ") + e.what());
  }
}

// ---------------------------------------------------------------- analysis

Json trace_to_json(const SompTrace<double>& trace) {
  Json norms = Json::array();
  for (double r : trace.residual_norms) norms.push_back(r);
  return Json{{"selected", index_list(trace.selected)}, {"residual_norms", norms}};
}

Json profile_to_json(const NoiselessProfile& p) {
  Json entries = Json::array();
  for (const auto& e : p.entries) {
    entries.push_back(Json{{"t", e.t},
                           {"subset", index_list(e.subset)},
                           {"gamma_c", number_or_tag(e.gamma.gamma_c)},
                           {"gamma_i", number_or_tag(e.gamma.gamma_i)},
                           {"j_c", e.gamma.jc},
                           {"j_i", e.gamma.ji}});
  }
  Json out{{"s", p.s},
           {"gamma_exact", number_or_tag(p.gamma_exact.value)},
           {"gamma_infinite", std::isinf(p.gamma_exact.value)},
           {"gamma_degenerate", p.gamma_exact.degenerate},
           {"delta_ric", number_or_tag(p.delta_ric)},
           {"rip_holds", p.rip_holds},
           {"psi", number_or_tag(p.psi)},
           {"tau_x", number_or_tag(p.tau_x)},
           {"gamma_ric_bound", p.gamma_ric_bound ? number_or_tag(*p.gamma_ric_bound) : Json()},
           {"gamma_erc_bound", p.gamma_erc_bound ? number_or_tag(*p.gamma_erc_bound) : Json()},
           {"entries", entries}};
  return out;
}

Json bound_report_to_json(const BoundReport& r) {
  const auto opt = [](const std::optional<double>& v) { return v ? number_or_tag(*v) : Json(); };
  return Json{{"gamma", number_or_tag(r.gamma)},
              {"delta_e_global", opt(r.delta_e_global)},
              {"delta_e_exact_min", opt(r.delta_e_exact_min)},
              {"theorem3_bound", number_or_tag(r.theorem3_bound)},
              {"c_s_exact", r.c_s_exact},
              {"c_s_upper", number_or_tag(r.c_s_upper)},
              {"xi", opt(r.xi)},
              {"k_min_theoretical", opt(r.k_min_theoretical)},
              {"p_err", number_or_tag(r.p_err)},
              {"valid", r.valid},
              {"vacuous", r.vacuous}};
}

// ---------------------------------------------------------------- experiments

ExperimentConfig experiment_config_from_json(const Json& doc) {
  const std::string where = "experiment config";
  require_object(doc, where);
  reject_unknown_keys(doc,
                      {"m", "n", "support_size", "k", "mu_x", "noise", "fresh_matrix", "matrix_seed",
                       "master_seed", "trials", "grid", "kmin", "output"},
                      where);
  ExperimentConfig c;
  TrialConfig& t = c.trial;
  t.m = as_count(required(doc, "m", where), "m");
  t.n = as_count(required(doc, "n", where), "n");
  t.support_size = as_count(required(doc, "support_size", where), "support_size");
  if (doc.contains("k")) t.k = as_count(doc["k"], "k");
  if (doc.contains("mu_x")) t.mu_x = as_real(doc["mu_x"], "mu_x");
  if (doc.contains("noise")) t.noise = noise_descriptor_from_json(doc["noise"], "noise");
  if (doc.contains("fresh_matrix")) t.fresh_matrix = as_bool(doc["fresh_matrix"], "fresh_matrix");
  if (doc.contains("matrix_seed")) t.matrix_seed = as_seed(doc["matrix_seed"], "matrix_seed");
  if (doc.contains("master_seed")) t.master_seed = as_seed(doc["master_seed"], "master_seed");
  if (doc.contains("trials")) {
    const Index trials = as_count(doc["trials"], "trials");
    if (trials < 1) config_error("trials must be >= 1");
    c.trials = static_cast<std::uint64_t>(trials);
  }

  const Json& grid = required(doc, "grid", where);
  require_object(grid, "grid");
  reject_unknown_keys(grid, {"snr", "k", "r_sigma"}, "grid");
  c.snr = as_list<double>(required(grid, "snr", "grid"), "grid.snr", as_real);
  c.k = as_list<Index>(required(grid, "k", "grid"), "grid.k", as_count);
  c.r_sigma = grid.contains("r_sigma") ? as_list<double>(grid["r_sigma"], "grid.r_sigma", as_real)
                                       : std::vector<double>{1.0};
  if (c.snr.empty() || c.k.empty() || c.r_sigma.empty()) config_error("grid axes must be nonempty");
  for (double s : c.snr) {
    if (!(s >= 0.0) || !std::isfinite(s)) config_error("grid.snr values must be finite and nonnegative");
  }
  for (Index k : c.k) {
    if (k < 1) config_error("grid.k values must be >= 1");
  }
  for (double r : c.r_sigma) {
    if (!(r > 0.0) || !std::isfinite(r)) config_error("grid.r_sigma values must be finite and positive");
  }

  if (doc.contains("kmin")) {
    const Json& km = doc["kmin"];
    require_object(km, "kmin");
    reject_unknown_keys(km, {"p_err", "k_lo", "k_hi", "step", "method"}, "kmin");
    if (km.contains("p_err")) c.kmin.p_err = as_list<double>(km["p_err"], "kmin.p_err", as_real);
    if (km.contains("k_lo")) c.kmin.k_lo = as_count(km["k_lo"], "kmin.k_lo");
    if (km.contains("k_hi")) c.kmin.k_hi = as_count(km["k_hi"], "kmin.k_hi");
    if (km.contains("step")) c.kmin.step = as_count(km["step"], "kmin.step");
    if (km.contains("method")) {
      const std::string m = as_string(km["method"], "kmin.method");
      if (m == "bisection") {
        c.kmin.method = KminMethod::Bisection;
      } else if (m == "linear") {
        c.kmin.method = KminMethod::LinearScan;
      } else {
        config_error("kmin.method must be 'bisection' or 'linear'");
      }
    }
    if (c.kmin.p_err.empty()) config_error("kmin.p_err must be nonempty");
    for (double p : c.kmin.p_err) {
      if (!(p > 0.0 && p < 1.0)) config_error("kmin.p_err values must lie in (0,1)");
    }
    if (c.kmin.k_lo < 1 || c.kmin.k_hi < c.kmin.k_lo) config_error("kmin range must satisfy 1 <= k_lo <= k_hi");
    if (c.kmin.step < 1) config_error("kmin.step must be >= 1");
  }
  if (doc.contains("output")) c.output = as_string(doc["output"], "output");

  // The template must be valid for every cell.
  for (Index k : c.k) {
    TrialConfig probe = t;
    probe.k = k;
    probe.noise = NoiseDescriptor{};
    validate(probe);
  }
  return c;
}

Json experiment_config_to_json(const ExperimentConfig& c) {
  Json k = Json::array();
  for (Index v : c.k) k.push_back(v);
  Json out{{"m", c.trial.m},
           {"n", c.trial.n},
           {"support_size", c.trial.support_size},
           {"fresh_matrix", c.trial.fresh_matrix},
           {"matrix_seed", c.trial.matrix_seed},
           {"master_seed", c.trial.master_seed},
           {"trials", c.trials},
           {"grid", Json{{"snr", c.snr}, {"k", k}, {"r_sigma", c.r_sigma}}},
           {"kmin", Json{{"p_err", c.kmin.p_err},
                         {"k_lo", c.kmin.k_lo},
                         {"k_hi", c.kmin.k_hi},
                         {"step", c.kmin.step},
                         {"method", method_name(c.kmin.method)}}}};
  if (c.output) out["output"] = *c.output;
  return out;
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::string out = std::string(kSweepCsvHeader) + "\n";
  for (const SweepRow& row : rows) {
    out += format_double(row.cell.snr) + "," + std::to_string(row.cell.k) + "," + format_double(row.cell.r_sigma);
    if (row.error) {
      out += ",,,,,\n";
      continue;
    }
    const McResult& r = row.result;
    out += "," + std::to_string(r.trials) + "," + std::to_string(r.failures) + "," + format_double(r.p_fail) + "," +
           format_double(r.ci_low) + "," + format_double(r.ci_high) + "\n";
  }
  return out;
}

std::string fit_dataset_to_csv(const FitDataset& dataset) {
  std::string out = std::string(kFitCsvHeader) + "\n";
  for (const FitRow& row : dataset) {
    out += format_double(row.p_err) + "," + format_double(row.snr_min) + "," + format_double(row.omega_sigma) +
           "," + format_double(row.k_min) + "\n";
  }
  return out;
}

FitDataset fit_dataset_from_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) config_error(origin + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFitCsvHeader) config_error(origin + ": header must be '" + std::string(kFitCsvHeader) + "'");
  FitDataset out;
  std::size_t number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    const std::string where = origin + " line " + std::to_string(number);
    if (fields.size() != 4) config_error(where + ": expected 4 fields");
    out.push_back(FitRow{parse_csv_real(fields[0], where), parse_csv_real(fields[1], where),
                         parse_csv_real(fields[2], where), parse_csv_real(fields[3], where)});
  }
  try {
    validate(out);
  } catch (const Error& e) {
    config_error(origin + ": " + e.what());
  }
  return out;
}

Json fit_result_to_json(const FitResult& result) {
  Json out{{"alpha", result.params.alpha},
           {"beta", result.params.beta},
           {"gamma", result.params.gamma},
           {"cost", result.cost},
           {"grid", fit_grid_to_json(result.grid)}};
  if (result.refined_stage) out["refined_stage"] = fit_grid_to_json(*result.refined_stage);
  return out;
}

FitParams fit_params_from_json(const Json& doc) {
  const std::string where = "fit params";
  require_object(doc, where);
  reject_unknown_keys(doc, {"alpha", "beta", "gamma", "cost", "grid", "refined_stage"}, where);
  FitParams p;
  p.alpha = as_real(required(doc, "alpha", where), "alpha");
  p.beta = as_real(required(doc, "beta", where), "beta");
  p.gamma = as_real(required(doc, "gamma", where), "gamma");
  if (!(p.alpha > 0.0)) config_error("alpha must be positive");
  if (!(p.beta >= 0.0)) config_error("beta must be nonnegative");
  if (!(p.gamma >= 0.0)) config_error("gamma must be nonnegative");
  return p;
}

}  // namespace somp
