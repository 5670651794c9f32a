#pragma once

// Simultaneous orthogonal matching pursuit.

#include "somp/error.hpp"
#include "somp/linalg.hpp"
#include "somp/signal_model.hpp"
#include "somp/types.hpp"

#include <optional>
#include <vector>

namespace somp {

template <class Scalar>
struct SompTrace {
  IndexSet selected;                   ///< j_0, j_1, ... in selection order
  std::vector<Scalar> residual_norms;  ///< ||R^(t)||_F for t = 0..iterations
  std::optional<std::vector<Vector<Scalar>>> metrics;  ///< metric vector seen at each pass
};

/// Entry j is sum_k |<phi_j, r_k>|.
template <class DerivedR, class DerivedPhi>
Vector<typename DerivedR::Scalar> selection_metric(const Eigen::MatrixBase<DerivedR>& residual,
                                                   const Eigen::MatrixBase<DerivedPhi>& phi) {
  if (residual.rows() != phi.rows()) {
    throw Error(Errc::DimensionMismatch, "selection metric: residual and atoms differ in length");
  }
  return (phi.transpose() * residual).cwiseAbs().rowwise().sum();
}

template <class DerivedR>
Vector<typename DerivedR::Scalar> selection_metric(const Eigen::MatrixBase<DerivedR>& residual,
                                                   const SensingMatrix& phi) {
  return selection_metric(residual, phi.matrix().template cast<typename DerivedR::Scalar>());
}

/// Index of the largest entry; ties go to the lowest index.
template <class Derived>
Index argmax_lowest(const Eigen::MatrixBase<Derived>& v) {
  Index best = 0;
  for (Index j = 1; j < v.size(); ++j) {
    if (v(j) > v(best)) best = j;
  }
  return best;
}

/// Runs exactly `iterations` passes. Every pass recomputes the residual from Y
/// by projecting onto the orthogonal complement of the selected atoms.
template <class DerivedY, class DerivedPhi>
SompTrace<typename DerivedY::Scalar> simultaneous_omp(const Eigen::MatrixBase<DerivedY>& y,
                                                      const Eigen::MatrixBase<DerivedPhi>& phi,
                                                      Index iterations,
                                                      bool record_metrics = false) {
  using Scalar = typename DerivedY::Scalar;
  if (y.rows() != phi.rows()) {
    throw Error(Errc::DimensionMismatch, "somp: measurements and atoms differ in length");
  }
  if (iterations < 1 || iterations > phi.rows() || iterations > phi.cols()) {
    throw Error(Errc::InvalidArgument, "somp: iterations must satisfy 1 <= s <= m");
  }
  const Matrix<Scalar> measurements = y;
  SompTrace<Scalar> trace;
  if (record_metrics) trace.metrics.emplace();
  Matrix<Scalar> residual = measurements;
  trace.residual_norms.push_back(residual.norm());
  for (Index t = 0; t < iterations; ++t) {
    Vector<Scalar> metric = selection_metric(residual, phi);
    trace.selected.push_back(argmax_lowest(metric));
    if (record_metrics) trace.metrics->push_back(std::move(metric));
    const Matrix<Scalar> atoms = select_columns(phi, trace.selected);
    residual = measurements - atoms * least_squares_coefficients(atoms, measurements);
    trace.residual_norms.push_back(residual.norm());
  }
  return trace;
}

template <class DerivedY>
SompTrace<typename DerivedY::Scalar> simultaneous_omp(const Eigen::MatrixBase<DerivedY>& y,
                                                      const SensingMatrix& phi,
                                                      Index iterations,
                                                      bool record_metrics = false) {
  return simultaneous_omp(y, phi.matrix().template cast<typename DerivedY::Scalar>(), iterations,
                          record_metrics);
}

}  // namespace somp
