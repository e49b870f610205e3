#pragma once

#include <stdexcept>
#include <string>

namespace gibbslab {

enum class ErrorKind {
  DimensionMismatch,
  NonDominant,
  AsymmetricInteraction,
  DecayViolated,
  IllTemperedBoundary,
  InvalidPotential,
  Overflow,
  BudgetExceeded,
  EigensolveFailure,
  SolverDiverged,
  NotPositiveDefinite,
  NonFiniteEnergy,
  TooFewBatches,
  BadRadius,
  NotDominant,
  ConditionViolated,
  NoAdmissibleL,
  BadSplit,
  DegeneratePoints,
  TooFewPoints,
  InvalidArgument,
  ConfigParse,
  Io,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a kind so the CLI can map it
/// to an exit code; the message names the offending sites where applicable.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace gibbslab
