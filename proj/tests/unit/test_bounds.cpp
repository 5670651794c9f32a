#include "oracles.hpp"

#include "somp/bounds.hpp"
#include "somp/error.hpp"
#include "somp/linalg.hpp"
#include "somp/monte_carlo.hpp"
#include "somp/noiseless.hpp"
#include "somp/signal_model.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace somp;

namespace {

const double kSqrt2Pi = std::sqrt(2.0 / std::numbers::pi);

template <class Fn>
void expect_code(Errc code, Fn&& fn) {
  try {
    fn();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(to_string(e.code()) == to_string(code));
  }
}

}  // namespace

TEST_CASE("Lipschitz constant") {
  VectorXd v(2);
  v << 3, 4;
  CHECK(lipschitz_constant(v) == 5.0);
  CHECK(lipschitz_constant(VectorXd::Zero(3)) == 0.0);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> u(0, 3);
  VectorXd w(17);
  double s = 0;
  for (Index i = 0; i < 17; ++i) {
    w(i) = u(gen);
    s += w(i) * w(i);
  }
  CHECK(lipschitz_constant(w) == doctest::Approx(std::sqrt(s)).epsilon(1e-15));
}

TEST_CASE("Theorem 2 bound") {
  const NoiseSpec sigma = alternating_sigma(0.5, 2, 4);
  const double power = sigma.sigma().squaredNorm();
  const Index n = 50, size = 5;
  const auto small = theorem2_bound(1e-9, sigma, n, size);
  CHECK(small.value == doctest::Approx(46.0).epsilon(1e-12));
  CHECK(small.valid);
  CHECK(small.vacuous);
  const double unity = std::sqrt(8 * power * std::log(46.0));
  CHECK(theorem2_bound(unity, sigma, n, size).value == doctest::Approx(1.0).epsilon(1e-12));
  const double de = 3.0;
  const double b1 = theorem2_bound(de, sigma, n, size).value;
  const double b2 = theorem2_bound(2 * de, sigma, n, size).value;
  CHECK(b2 == doctest::Approx(std::pow(b1, 4) / std::pow(46.0, 3)).epsilon(1e-10));
  const auto invalid = theorem2_bound(-1.0, sigma, n, size);
  CHECK_FALSE(invalid.valid);
  CHECK(invalid.value == 46.0);
}

TEST_CASE("C_s") {
  CHECK(c_s(2, 1).exact == 3u);
  CHECK(c_s(10, 9).exact == 1023u);
  CHECK(c_s(7, 0).exact == 1u);
  for (Index size = 1; size <= 20; ++size) {
    for (Index s = 0; s <= size; ++s) {
      const CsValue v = c_s(size, s);
      std::uint64_t tail = 0;
      for (Index t = s + 1; t <= size; ++t) tail += oracle::pascal(size, t);
      CHECK(v.exact == (std::uint64_t{1} << size) - tail);
      if (s >= 1) CHECK(static_cast<double>(v.exact) <= v.upper + 1e-9);
    }
  }
  CHECK_THROWS_AS(c_s(3, 4), Error);
}

TEST_CASE("global gap, xi and K_min") {
  const NoiseSpec zero(VectorXd::Zero(3));
  CHECK(delta_e_global(2.0, 0.8, 3.0, zero) == doctest::Approx(0.5 * 0.8 * 3.0).epsilon(1e-15));
  const NoiseSpec sigma = alternating_sigma(0.4, 1.5, 4);
  CHECK(delta_e_global(std::numeric_limits<double>::infinity(), 1.0, 5.0, sigma) ==
        doctest::Approx(5.0 - kSqrt2Pi * sigma.sigma().lpNorm<1>()).epsilon(1e-15));
  expect_code(Errc::GammaNotAboveOne, [&] { delta_e_global(1.0, 1.0, 1.0, sigma); });

  CHECK(xi(2, 0.8, 3, 1) == doctest::Approx(1.2 - kSqrt2Pi).epsilon(1e-14));
  CHECK(xi(2, 0.8, 3, 1) == doctest::Approx(0.40212).epsilon(1e-5));
  const double threshold = kSqrt2Pi / (0.5 * 0.8);
  CHECK(std::abs(xi(2, 0.8, threshold, 1)) < 1e-15);
  CHECK(xi(2, 0.8, 1e9, 1) > 1e8);
  expect_code(Errc::GammaNotAboveOne, [&] { xi(0.5, 0.8, 3, 1); });

  CHECK(k_min_theoretical(1, 1000, 1023, 0.05) == doctest::Approx(8 * std::log(1000 * 1023 / 0.05)).epsilon(1e-14));
  CHECK(k_min_theoretical(1, 1000, 1023, 0.05) == doctest::Approx(134.67).epsilon(1e-4));
  CHECK(std::abs(k_min_theoretical(0.7, 10, 3, 30)) < 1e-14);
  CHECK(k_min_theoretical(0.7, 10, 3, 0.025) - k_min_theoretical(0.7, 10, 3, 0.05) ==
        doctest::Approx(8 / 0.49 * std::log(2.0)).epsilon(1e-12));
  expect_code(Errc::NonpositiveXi, [&] { k_min_theoretical(0, 10, 3, 0.1); });

  // Round trip: at K = ceil(K_min) the Theorem-3 bound with unit-mean
  // alternating noise and dE = K xi sigma(K) ... is below p_err.
  const double gamma = 3, psi = 0.9, snr = 2.0, p_err = 0.05;
  const Index n = 64, size = 4, s = 3;
  const NoiseSpec unit1 = unit_mean_alternating_sigma(1.0, 2);
  const double xv = xi(gamma, psi, snr, omega_sigma(unit1));
  const double kmin = k_min_theoretical(xv, n, static_cast<double>(c_s(size, s).exact), p_err);
  const Index k = static_cast<Index>(std::ceil(kmin));
  const NoiseSpec unit = unit_mean_alternating_sigma(1.0, k);
  const double de = delta_e_global(gamma, psi, k * snr, unit);
  CHECK(theorem3_bound(de, unit, n, size, s).value <= p_err);
}

TEST_CASE("Theorem 3 bound") {
  const NoiseSpec sigma = alternating_sigma(0.3, 2, 6);
  const auto invalid = theorem3_bound(0.0, sigma, 40, 4, 2);
  CHECK_FALSE(invalid.valid);
  CHECK(invalid.value == 40.0 * 11.0);
  const double power = sigma.sigma().squaredNorm();
  // Regression-locked re-evaluation of the explicit formula under scaling.
  for (double c : {0.25, 0.5, 1.0}) {
    const NoiseSpec scaled(c * sigma.sigma());
    const double de = delta_e_global(4.0, 0.9, 6.0, scaled);
    REQUIRE(de > 0);
    const double expected = 40.0 * 11.0 * std::exp(-de * de / (8 * c * c * power));
    CHECK(theorem3_bound(de, scaled, 40, 4, 2).value == doctest::Approx(expected).epsilon(1e-14));
  }
  for (double de : {0.5, 2.0, 5.0}) {
    for (Index s = 0; s < 4; ++s) {
      CHECK(theorem3_bound(de, sigma, 40, 4, s).value >= theorem2_bound(de, sigma, 40, 4).value);
    }
  }
}

TEST_CASE("global gap lower-bounds every exact gap") {
  int checked = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const SensingMatrix phi = sample_sensing_matrix(14, 18, 2000 + seed);
    const auto d = generate_instance(phi, 2 + seed % 2, 4, 1.0, alternating_sigma(0.05, 2, 4), seed);
    const Index size = static_cast<Index>(d.support.size());
    const auto profile = compute_profile(phi, d.x, d.support, size - 1);
    if (!profile.rip_holds || !(profile.gamma_exact.value > 1.0)) continue;
    const double global = delta_e_global(profile.gamma_exact.value, profile.psi, profile.tau_x, d.noise);
    for (const auto& entry : profile.entries) {
      CHECK(global <= delta_e_exact(phi, d.x, d.support, d.noise, entry.subset) + 1e-9);
    }
    ++checked;
  }
  CHECK(checked > 20);
}

TEST_CASE("Theorem 1 tail estimate") {
  const SensingMatrix phi = sample_sensing_matrix(16, 40, 5);
  const auto d = generate_instance(phi, 3, 6, 1.0, alternating_sigma(0.25, 1.5, 6), 7);
  const auto low = theorem1_tail_estimate(phi, d.x, d.support, d.noise, {}, 1e-6, 20000, 1);
  CHECK(low.p_correct_low == 0.0);
  const auto high = theorem1_tail_estimate(phi, d.x, d.support, d.noise, {}, 1e6, 20000, 1);
  CHECK(high.p_incorrect_high == 0.0);
  CHECK(high.p_correct_low == 1.0);
  CHECK_THROWS_AS(theorem1_tail_estimate(phi, d.x, d.support, d.noise, {}, 1.0, 100, 1), Error);
  CHECK_THROWS_AS(theorem1_tail_estimate(phi, d.x, d.support, d.noise, {}, 0.0, 20000, 1), Error);

  // Midpoint alpha bounds the simulated one-iteration failure rate.
  for (const IndexSet& subset : std::vector<IndexSet>{{}, {d.support[1]}}) {
    const NoiseSpec loud(3.0 * d.noise.sigma());
    const double alpha = theorem1_midpoint_alpha(phi, d.x, d.support, loud, subset);
    const auto est = theorem1_tail_estimate(phi, d.x, d.support, loud, subset, alpha, 100000, 3);
    const McResult sim = estimate_one_iteration_failure(phi, d.x, d.support, loud, subset, 20000, 9, 4);
    const double se = std::sqrt(est.se_correct * est.se_correct + est.se_incorrect * est.se_incorrect +
                                sim.standard_error() * sim.standard_error());
    CHECK(sim.p_fail <= est.bound() + 3 * se);
  }
}

TEST_CASE("Theorem 2 validity per projector") {
  const SensingMatrix phi = sample_sensing_matrix(24, 48, 8);
  const auto d = generate_instance(phi, 3, 16, 1.0, alternating_sigma(0.35, 1.0, 16), 3);
  const auto profile = compute_profile(phi, d.x, d.support, 2);
  int checked = 0;
  for (const auto& entry : profile.entries) {
    const double de = delta_e_exact(phi, d.x, d.support, d.noise, entry.subset);
    if (!(de > 0)) continue;
    const double bound = theorem2_bound(de, d.noise, 48, 3).value;
    const McResult sim = estimate_one_iteration_failure(phi, d.x, d.support, d.noise, entry.subset, 4000, 11, 4);
    CHECK(sim.p_fail <= bound + 3 * sim.standard_error());
    ++checked;
  }
  CHECK(checked > 0);
}

TEST_CASE("bound report") {
  const SensingMatrix phi = identity_sensing_matrix(10);
  const auto d = generate_instance(phi, 3, 8, 1.0, NoiseSpec(VectorXd::Constant(8, 0.2)), 4);
  const auto profile = compute_profile(phi, d.x, d.support, 2);
  CHECK(std::isinf(profile.gamma_exact.value));
  const auto report = bound_report(profile, d, 0.05);
  REQUIRE(report.delta_e_global);
  CHECK(*report.delta_e_global == doctest::Approx(8.0 - kSqrt2Pi * 1.6).epsilon(1e-14));
  CHECK(report.valid);
  CHECK(report.c_s_exact == 7u);
  CHECK(static_cast<double>(report.c_s_exact) <= report.c_s_upper + 1e-9);
  REQUIRE(report.k_min_theoretical);
  CHECK(*report.k_min_theoretical > 0);
  REQUIRE(report.delta_e_exact_min);
  CHECK(*report.delta_e_exact_min >= *report.delta_e_global - 1e-12);
  CHECK(report.theorem3_bound == theorem3_bound(*report.delta_e_global, d.noise, 10, 3, 2).value);
}
