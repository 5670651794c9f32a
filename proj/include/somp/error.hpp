#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace somp {

enum class Errc {
  InvalidArgument,
  InvalidDimensions,
  DimensionMismatch,
  RankDeficient,
  NotSymmetric,
  AllZeroNoise,
  EmptySupport,
  FullSupport,
  CombinatorialBlowup,
  GammaNotAboveOne,
  NonpositiveXi,
  InfeasibleGamma,
  NoFeasiblePoint,
  BelowSnrFloor,
  NotFound,
  Config,
  Io,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-checkable error category.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace somp
