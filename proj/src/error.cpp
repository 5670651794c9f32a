#include "somp/error.hpp"

namespace somp {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::InvalidDimensions: return "InvalidDimensions";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::RankDeficient: return "RankDeficient";
    case Errc::NotSymmetric: return "NotSymmetric";
    case Errc::AllZeroNoise: return "AllZeroNoise";
    case Errc::EmptySupport: return "EmptySupport";
    case Errc::FullSupport: return "FullSupport";
    case Errc::CombinatorialBlowup: return "CombinatorialBlowup";
    case Errc::GammaNotAboveOne: return "GammaNotAboveOne";
    case Errc::NonpositiveXi: return "NonpositiveXi";
    case Errc::InfeasibleGamma: return "InfeasibleGamma";
    case Errc::NoFeasiblePoint: return "NoFeasiblePoint";
    case Errc::BelowSnrFloor: return "BelowSnrFloor";
    case Errc::NotFound: return "NotFound";
    case Errc::Config: return "Config";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

}  // namespace somp
