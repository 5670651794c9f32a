#pragma once

// Dense building blocks shared by the solver and the noiseless analysis.
// Every function is a pure template over the Eigen scalar type.

#include "somp/error.hpp"
#include "somp/types.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <string>

namespace somp {

/// Relative singular-value threshold below which a column set is treated as
/// rank deficient.
inline constexpr double kRankTolerance = 1e-10;

namespace detail {

template <class Scalar>
Eigen::JacobiSVD<Matrix<Scalar>> checked_thin_svd(const Matrix<Scalar>& a) {
  if (a.rows() < 1 || a.cols() < 1) {
    throw Error(Errc::InvalidDimensions, "empty matrix");
  }
  if (a.rows() < a.cols()) {
    throw Error(Errc::RankDeficient,
                "more columns (" + std::to_string(a.cols()) + ") than rows (" +
                    std::to_string(a.rows()) + ")");
  }
  Eigen::JacobiSVD<Matrix<Scalar>> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Scalar largest = sv(0);
  const Scalar smallest = sv(sv.size() - 1);
  if (!(largest > Scalar(0)) || smallest <= Scalar(kRankTolerance) * largest) {
    throw Error(Errc::RankDeficient, "column set is rank deficient");
  }
  return svd;
}

}  // namespace detail

/// Returns C minimising ||A C - B||_F for a full-column-rank A, via the SVD of A.
template <class DerivedA, class DerivedB>
Matrix<typename DerivedA::Scalar> least_squares_coefficients(
    const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  using Scalar = typename DerivedA::Scalar;
  if (a.rows() != b.rows()) {
    throw Error(Errc::DimensionMismatch, "least squares: row counts differ");
  }
  const auto svd = detail::checked_thin_svd<Scalar>(a.eval());
  return svd.solve(b.template cast<Scalar>().eval());
}

/// Orthogonal projector A A^+ onto the range of A, materialised as m x m.
template <class Derived>
Matrix<typename Derived::Scalar> orthogonal_projector(const Eigen::MatrixBase<Derived>& a) {
  using Scalar = typename Derived::Scalar;
  const auto svd = detail::checked_thin_svd<Scalar>(a.eval());
  return svd.matrixU() * svd.matrixU().transpose();
}

/// Maximum absolute row sum.
template <class Derived>
typename Derived::Scalar operator_norm_inf_inf(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return typename Derived::Scalar(0);
  return a.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Maximum absolute column sum.
template <class Derived>
typename Derived::Scalar operator_norm_one_one(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return typename Derived::Scalar(0);
  return a.cwiseAbs().colwise().sum().maxCoeff();
}

template <class Scalar>
struct EigenExtremes {
  Scalar min;
  Scalar max;
};

/// Smallest and largest eigenvalue of a symmetric matrix.
template <class Derived>
EigenExtremes<typename Derived::Scalar> symmetric_eigen_extremes(
    const Eigen::MatrixBase<Derived>& g) {
  using Scalar = typename Derived::Scalar;
  if (g.rows() != g.cols() || g.rows() < 1) {
    throw Error(Errc::InvalidDimensions, "eigen extremes: matrix must be square");
  }
  const Scalar scale = std::max(Scalar(1), g.cwiseAbs().maxCoeff());
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > Scalar(1e-12) * scale) {
    throw Error(Errc::NotSymmetric, "eigen extremes: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix<Scalar>> solver(g.eval(), Eigen::EigenvaluesOnly);
  const auto& ev = solver.eigenvalues();  // ascending
  return {ev(0), ev(ev.size() - 1)};
}

/// Columns of `a` selected by `cols`, in the given order.
template <class Derived>
Matrix<typename Derived::Scalar> select_columns(const Eigen::MatrixBase<Derived>& a,
                                                 const IndexSet& cols) {
  Matrix<typename Derived::Scalar> out(a.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) {
    out.col(static_cast<Index>(c)) = a.col(cols[c]);
  }
  return out;
}

/// Rows of `a` listed in `rows`, in that order.
template <class Derived>
Matrix<typename Derived::Scalar> select_rows(const Eigen::MatrixBase<Derived>& a,
                                              const IndexSet& rows) {
  Matrix<typename Derived::Scalar> out(static_cast<Index>(rows.size()), a.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    out.row(static_cast<Index>(r)) = a.row(rows[r]);
  }
  return out;
}

}  // namespace somp
