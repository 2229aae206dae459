#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace chemo {

/// Failure categories raised across the library. Every public operation
/// reports contract violations by throwing chemo::Error with one of these.
enum class Errc {
  // model
  DimensionOutOfRange,
  SubcriticalExponent,
  MassBoundsInverted,
  NonpositiveParameter,
  LowerBoundViolated,
  NegativeDensity,
  // radial solver
  TooFewNodes,
  MeanMismatch,
  StabilityViolated,
  NegativeDensityProduced,
  // mass system
  UndefinedDerivative,
  NegativePhi,
  MonotonicityLost,
  // subsolution
  SelectionInfeasible,
  HorizonExceeded,
  InfeasibleInitialData,
  // verifier
  LatticeTooCoarse,
  HypothesisWindowEmpty,
  // plumbing
  ConfigError,
  IoError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace chemo
