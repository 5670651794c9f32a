#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace somp {

template <class Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <class Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

using Index = Eigen::Index;

/// Sorted list of column indices; used for supports and their subsets.
using IndexSet = std::vector<Index>;

using Seed = std::uint64_t;

}  // namespace somp
