// End-to-end tests of the somptool executable: exit codes, byte-level
// determinism, and goldens computed independently by tests/data/make_goldens.py.

#include <doctest.h>
#include <json.hpp>

#include <sys/wait.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

std::string data(const std::string& name) { return std::string(SOMP_DATA_DIR) + "/" + name; }

fs::path scratch() {
  const fs::path dir = fs::path(SOMP_SCRATCH_DIR) / "cli";
  fs::create_directories(dir);
  return dir;
}

Run run(const std::string& args) {
  const std::string command = std::string("\"") + SOMPTOOL + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(command.c_str(), "r");
  REQUIRE(pipe != nullptr);
  Run r;
  std::array<char, 4096> buffer{};
  std::size_t got = 0;
  while ((got = std::fread(buffer.data(), 1, buffer.size(), pipe)) > 0) r.out.append(buffer.data(), got);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Json load(const std::string& path) { return Json::parse(slurp(path)); }

// Agreement to 10 significant digits, or 1e-12 absolute near zero.
bool close(double a, double b) { return std::abs(a - b) <= 1e-10 * std::max(std::abs(a), std::abs(b)) + 1e-12; }

void compare(const Json& got, const Json& want, const std::string& where) {
  INFO(where);
  if (want.is_number_float() || (want.is_number() && got.is_number_float())) {
    REQUIRE(got.is_number());
    CHECK(close(got.get<double>(), want.get<double>()));
  } else if (want.is_object()) {
    for (const auto& [key, value] : want.items()) {
      REQUIRE(got.contains(key));
      compare(got[key], value, where + "." + key);
    }
  } else if (want.is_array()) {
    REQUIRE(got.is_array());
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) compare(got[i], want[i], where + "[" + std::to_string(i) + "]");
  } else {
    CHECK(got == want);
  }
}

}  // namespace

TEST_CASE("gen is deterministic and matches the stored instances") {
  const Run a = run("gen --config " + data("gen_k1.json"));
  REQUIRE(a.status == 0);
  CHECK(a.out == run("gen --config " + data("gen_k1.json")).out);
  CHECK(a.out == slurp(data("instance_k1.json")));
  const Run b = run("gen --config " + data("gen_k4.json"));
  CHECK(b.out == slurp(data("instance_k4.json")));

  const Run other = run("gen --config " + data("gen_k1.json") + " --seed 8");
  CHECK(other.status == 0);
  CHECK(other.out != a.out);

  const fs::path dir = scratch() / "gen";
  const std::string out = (scratch() / "instance.json").string();
  REQUIRE(run("gen --config " + data("gen_k4.json") + " --out " + out + " --csv-dir " + dir.string()).status == 0);
  CHECK(slurp(out) == b.out);
  const Json doc = Json::parse(b.out);
  std::istringstream phi(slurp((dir / "phi.csv").string()));
  std::string line;
  std::size_t row = 0;
  while (std::getline(phi, line)) {
    std::istringstream cells(line);
    std::string cell;
    std::size_t col = 0;
    while (std::getline(cells, cell, ',')) {
      CHECK(std::stod(cell) == doc["phi"][row][col].get<double>());
      ++col;
    }
    CHECK(col == 40);
    ++row;
  }
  CHECK(row == 24);
  CHECK(fs::exists(dir / "x.csv"));
  CHECK(fs::exists(dir / "y.csv"));
}

TEST_CASE("somp matches the numpy reference") {
  for (const char* name : {"k1", "k4"}) {
    const Run r = run(std::string("somp ") + data(std::string("instance_") + name + ".json"));
    REQUIRE(r.status == 0);
    const Json got = Json::parse(r.out);
    const Json want = load(data(std::string("somp_") + name + ".golden.json"));
    CHECK(got["selected"] == want["selected"]);
    compare(got["residual_norms"], want["residual_norms"], name);
  }
  const Run two = run("somp " + data("instance_k1.json") + " --iterations 2");
  CHECK(Json::parse(two.out)["selected"].size() == 2);
  CHECK(run("somp " + data("instance_k1.json") + " --iterations 0").status == 2);
}

TEST_CASE("analyze matches the numpy reference") {
  const Run r = run("analyze " + data("instance_k4.json") + " --s 2 --p-err 0.05");
  REQUIRE(r.status == 0);
  const Json got = Json::parse(r.out);
  compare(got, load(data("analyze_k4.golden.json")), "analyze");
  CHECK(got["profile"]["rip_holds"] == true);
  CHECK(got["bounds"]["valid"] == false);
  CHECK(got["bounds"]["vacuous"] == true);

  // Default s is |S| - 1.
  CHECK(Json::parse(run("analyze " + data("instance_k4.json")).out)["profile"]["s"] == 2);

  const std::string params = (scratch() / "params.json").string();
  std::ofstream(params) << R"({"alpha": 1.0535, "beta": 0.54045, "gamma": 2.0741})";
  const Json fitted = Json::parse(run("analyze " + data("instance_k4.json") + " --params " + params).out);
  CHECK(fitted["bounds"]["k_min_fitted"].is_number());

  CHECK(run("analyze " + data("instance_k4.json") + " --s 3").status == 2);
  CHECK(run("analyze " + data("instance_k4.json") + " --p-err 1.5").status == 2);
  CHECK(run("analyze " + data("instance_k4.json") + " --guard 100").status == 4);
}

TEST_CASE("exit codes") {
  CHECK(run("gen --config " + data("unknown_key.json")).status == 2);
  CHECK(run("gen --config " + data("malformed.json")).status == 2);
  CHECK(run("gen --config " + data("does_not_exist.json")).status == 3);
  CHECK(run("gen").status == 2);
  CHECK(run("gen --config " + data("gen_k1.json") + " --out " + (scratch() / "no/such/dir/x.json").string())
            .status == 3);
  CHECK(run("somp " + data("does_not_exist.json")).status == 3);
  CHECK(run("frobnicate").status == 2);
  CHECK(run("").status == 2);
  CHECK(run("sweep --config " + data("sweep_small.json") + " --jobs 0").status == 2);
  CHECK(run("sweep --config " + data("gen_k1.json")).status == 2);
  CHECK(run("--help").status == 0);
}

TEST_CASE("sweep output is independent of --jobs") {
  const Run one = run("sweep --config " + data("sweep_small.json") + " --jobs 1");
  const Run eight = run("sweep --config " + data("sweep_small.json") + " --jobs 8");
  REQUIRE(one.status == 0);
  CHECK(one.out == eight.out);
  std::istringstream in(one.out);
  std::string line;
  std::getline(in, line);
  CHECK(line == "snr,k,r_sigma,trials,failures,p_fail,ci_low,ci_high");
  int rows = 0;
  while (std::getline(in, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 7);
    CHECK(line.find(",200,") != std::string::npos);
    ++rows;
  }
  CHECK(rows == 4);

  const Run fewer = run("sweep --config " + data("sweep_small.json") + " --trials 50 --jobs 3");
  CHECK(fewer.out.find(",50,") != std::string::npos);
  CHECK(run("sweep --config " + data("sweep_small.json") + " --seed 99").out != one.out);
  const std::string out = (scratch() / "sweep.csv").string();
  CHECK(run("sweep --config " + data("sweep_small.json") + " --jobs 2 --out " + out).out.empty());
  CHECK(slurp(out) == one.out);
}

TEST_CASE("kmin, fit and predict chain") {
  const std::string table = (scratch() / "kmin.csv").string();
  const Run k = run("kmin --config " + data("kmin_small.json") + " --jobs 4 --out " + table);
  REQUIRE(k.status == 0);
  const std::string csv = slurp(table);
  CHECK(csv.rfind("p_err,snr_min,omega_sigma,k_min\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(run("kmin --config " + data("kmin_small.json") + " --jobs 1").out == csv);

  const Run fit = run("fit " + table + " --points 21");
  REQUIRE(fit.status == 0);
  const Json params = Json::parse(fit.out);
  CHECK(params["grid"]["alpha"]["points"] == 21);
  CHECK(params["grid"]["mode"] == "full");
  CHECK(params["beta"].get<double>() <= std::sqrt(2.0 / M_PI));

  const std::string params_path = (scratch() / "fit.json").string();
  std::ofstream(params_path) << fit.out;
  const Run predicted = run("predict --params " + params_path + " --snr 2 --omega 1 --p-err 0.1");
  CHECK(predicted.status == 0);
  CHECK(std::stod(predicted.out) > 0);
}

TEST_CASE("fit recovers planted parameters") {
  const Json want = load(data("fit_planted.golden.json"));
  const Run r = run("fit " + data("fit_planted.csv") + " --points 101 --jobs 3");
  REQUIRE(r.status == 0);
  const Json got = Json::parse(r.out);
  for (const char* key : {"alpha", "beta", "gamma"}) CHECK(close(got[key].get<double>(), want[key].get<double>()));
  CHECK(got["cost"].get<double>() < 1e-18);
  CHECK(got["grid"]["gamma"]["hi"] == 5.0);

  const Run staged = run("fit --config " + data("fit_planted.csv") + " --mode coarse_to_fine --coarse-points 20");
  REQUIRE(staged.status == 0);
  CHECK(Json::parse(staged.out).contains("refined_stage"));
  CHECK(run("fit " + data("fit_planted.csv") + " --mode sideways").status == 2);
  CHECK(run("fit " + data("sweep_small.json")).status == 2);
  CHECK(run("fit " + data("fit_planted.csv") + " --points 5 --gamma-range -5 -1").status == 2);
}

TEST_CASE("predict") {
  const std::string params = (scratch() / "fig2a.json").string();
  std::ofstream(params) << R"({"alpha": 1.0535, "beta": 0.54045, "gamma": 2.0741})";
  const Run r = run("predict --params " + params + " --snr 1.5 --omega 1 --p-err 0.5");
  REQUIRE(r.status == 0);
  const double expected = 8.0 / std::pow(1.0535 * 1.5 - 0.54045, 2) * (2.0741 + std::log(2.0));
  CHECK(std::stod(r.out) == doctest::Approx(expected).epsilon(1e-15));
  CHECK(std::stod(r.out) == doctest::Approx(20.5).epsilon(5e-3));
  CHECK(run("predict --config " + params + " --snr 1.5 --p-err 0.5").out == r.out);
  CHECK(run("predict --params " + params + " --snr 0.5 --omega 1 --p-err 0.5").status == 2);
  CHECK(run("predict --params " + params + " --snr 1.5 --p-err 0").status == 2);
  CHECK(run("predict --params " + data("gen_k1.json") + " --snr 1.5 --p-err 0.5").status == 2);
  CHECK(run("predict --snr 1.5 --p-err 0.5").status == 2);
}
