#include "oracles.hpp"

#include "somp/error.hpp"
#include "somp/noiseless.hpp"
#include "somp/signal_model.hpp"
#include "somp/solver.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

using namespace somp;

TEST_CASE("selection metric") {
  const SensingMatrix eye = identity_sensing_matrix(5);
  VectorXd expected = VectorXd::Zero(5);
  expected(1) = 1;
  CHECK(selection_metric(MatrixXd(eye.col(1)), eye) == expected);
  CHECK(selection_metric(MatrixXd::Zero(5, 3), eye).isZero(0.0));

  const SensingMatrix phi = sample_sensing_matrix(7, 11, 2);
  std::mt19937 gen(1);
  std::normal_distribution<double> normal;
  MatrixXd r(7, 3);
  for (Index i = 0; i < r.size(); ++i) r.data()[i] = normal(gen);
  const VectorXd lib = selection_metric(r, phi);
  for (Index j = 0; j < 11; ++j) {
    double s = 0;
    for (Index c = 0; c < 3; ++c) {
      double dot = 0;
      for (Index i = 0; i < 7; ++i) dot += phi.matrix()(i, j) * r(i, c);
      s += std::abs(dot);
    }
    CHECK(std::abs(lib(j) - s) < 1e-12);
  }
  try {
    selection_metric(MatrixXd::Zero(6, 1), phi);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DimensionMismatch);
  }
}

TEST_CASE("argmax ties go to the lowest index") {
  VectorXd v(5);
  v << 1, 3, 2, 3, 0;
  CHECK(argmax_lowest(v) == 1);
  CHECK(argmax_lowest(VectorXd::Zero(4)) == 0);
}

TEST_CASE("orthonormal noiseless recovery in decreasing row-sum order") {
  const SensingMatrix eye = identity_sensing_matrix(8);
  MatrixXd x = MatrixXd::Zero(8, 2);
  x.row(6) << 3, -1;   // 4
  x.row(1) << 0.5, 1;  // 1.5
  x.row(4) << -2, 0;   // 2
  const auto trace = simultaneous_omp(eye.matrix() * x, eye, 3);
  CHECK(trace.selected == IndexSet{6, 4, 1});
  CHECK(trace.residual_norms.size() == 4);
  CHECK(trace.residual_norms.back() < 1e-12);
}

TEST_CASE("K = 1 matches reference OMP") {
  for (int inst = 0; inst < 40; ++inst) {
    const SensingMatrix phi = sample_sensing_matrix(32, 64, 1000 + inst);
    const Index size = 2 + inst % 4;
    const auto data = generate_instance(phi, size, 1, 1.0, NoiseSpec(VectorXd::Constant(1, 0.1)), inst);
    const auto trace = simultaneous_omp(data.y, phi, size);
    CHECK(trace.selected == oracle::reference_omp(phi.matrix(), data.y.col(0), size));
  }
}

TEST_CASE("trace invariants") {
  const SensingMatrix phi = sample_sensing_matrix(20, 40, 9);
  for (int inst = 0; inst < 10; ++inst) {
    const auto data = generate_instance(phi, 5, 4, 1.0, alternating_sigma(0.4, 2, 4), 50 + inst);
    const auto trace = simultaneous_omp(data.y, phi, 8, true);
    REQUIRE(trace.metrics);
    CHECK(std::set<Index>(trace.selected.begin(), trace.selected.end()).size() == 8);
    for (std::size_t t = 1; t < trace.residual_norms.size(); ++t) {
      CHECK(trace.residual_norms[t] <= trace.residual_norms[t - 1] + 1e-9);
    }
    for (std::size_t t = 1; t < trace.metrics->size(); ++t) {
      for (std::size_t prior = 0; prior < t; ++prior) CHECK((*trace.metrics)[t](trace.selected[prior]) <= 1e-9);
    }
    // Phi_S^T R = 0 after the last pass.
    const MatrixXd atoms = select_columns(phi.matrix(), trace.selected);
    const MatrixXd r = data.y - atoms * least_squares_coefficients(atoms, data.y);
    CHECK((atoms.transpose() * r).cwiseAbs().maxCoeff() < 1e-9);

    // Scale invariance.
    CHECK(simultaneous_omp((3.7 * data.y).eval(), phi, 8).selected == trace.selected);

    // Permutation equivariance.
    std::vector<Index> perm(40);
    std::iota(perm.begin(), perm.end(), 0);
    std::mt19937 gen(inst);
    std::shuffle(perm.begin(), perm.end(), gen);
    MatrixXd permuted(20, 40);
    for (Index j = 0; j < 40; ++j) permuted.col(j) = phi.matrix().col(perm[j]);
    const auto ptrace = simultaneous_omp(data.y, permuted, 8);
    IndexSet mapped;
    for (Index j : ptrace.selected) mapped.push_back(perm[j]);
    CHECK(mapped == trace.selected);
  }
}

TEST_CASE("Appendix-A construction is picked first") {
  const SensingMatrix phi = sample_sensing_matrix(8, 12, 3);
  const IndexSet support{2, 5, 9};
  const VectorXd x = adversarial_single_atom_x(phi, support, 5, 1.0);
  const auto trace = simultaneous_omp(MatrixXd(phi.matrix() * x), phi, 1);
  const VectorXd metric = selection_metric(MatrixXd(phi.matrix() * x), phi);
  CHECK(metric(5) > 0);
  CHECK(metric(2) <= 1e-10);
  CHECK(metric(9) <= 1e-10);
  (void)trace;
}

TEST_CASE("solver errors") {
  const SensingMatrix phi = sample_sensing_matrix(4, 6, 1);
  CHECK_THROWS_AS(simultaneous_omp(MatrixXd::Ones(4, 2), phi, 0), Error);
  CHECK_THROWS_AS(simultaneous_omp(MatrixXd::Ones(4, 2), phi, 5), Error);
  try {
    simultaneous_omp(MatrixXd::Ones(3, 2), phi, 1);
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DimensionMismatch);
  }
  // Duplicate atoms: after the first pass the residual vanishes, the second
  // pass re-selects atom 0 and the selected set is rank deficient.
  MatrixXd dup = MatrixXd::Zero(2, 2);
  dup(0, 0) = dup(0, 1) = 1;
  try {
    simultaneous_omp(MatrixXd(dup.col(0)), SensingMatrix(dup), 2);
    FAIL("expected RankDeficient");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::RankDeficient);
  }
}

TEST_CASE("solver is generic over the scalar type") {
  const SensingMatrix phi = sample_sensing_matrix(10, 20, 4);
  const auto data = generate_instance(phi, 3, 2, 1.0, NoiseSpec(VectorXd::Zero(2)), 3);
  const Eigen::MatrixXf yf = data.y.cast<float>();
  const Eigen::MatrixXf phif = phi.matrix().cast<float>();
  const auto trace = simultaneous_omp(yf, phif, 3);
  IndexSet sorted = trace.selected;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == data.support);
}
