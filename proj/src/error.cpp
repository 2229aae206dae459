#include "chemo/error.hpp"

namespace chemo {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::DimensionOutOfRange: return "DimensionOutOfRange";
    case Errc::SubcriticalExponent: return "SubcriticalExponent";
    case Errc::MassBoundsInverted: return "MassBoundsInverted";
    case Errc::NonpositiveParameter: return "NonpositiveParameter";
    case Errc::LowerBoundViolated: return "LowerBoundViolated";
    case Errc::NegativeDensity: return "NegativeDensity";
    case Errc::TooFewNodes: return "TooFewNodes";
    case Errc::MeanMismatch: return "MeanMismatch";
    case Errc::StabilityViolated: return "StabilityViolated";
    case Errc::NegativeDensityProduced: return "NegativeDensityProduced";
    case Errc::UndefinedDerivative: return "UndefinedDerivative";
    case Errc::NegativePhi: return "NegativePhi";
    case Errc::MonotonicityLost: return "MonotonicityLost";
    case Errc::SelectionInfeasible: return "SelectionInfeasible";
    case Errc::HorizonExceeded: return "HorizonExceeded";
    case Errc::InfeasibleInitialData: return "InfeasibleInitialData";
    case Errc::LatticeTooCoarse: return "LatticeTooCoarse";
    case Errc::HypothesisWindowEmpty: return "HypothesisWindowEmpty";
    case Errc::ConfigError: return "ConfigError";
    case Errc::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace chemo
