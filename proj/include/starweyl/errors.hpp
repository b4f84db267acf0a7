#pragma once

#include <stdexcept>
#include <string>

namespace starweyl {

enum class Errc {
  // numeric kernel
  DegenerateLeadingCoefficient,
  NonConvergence,
  SingularSystem,
  MagnitudeOverflow,
  StepUnderflow,
  // graph model
  EmptyGraph,
  UnsortedOrders,
  ZeroGammaDiagonal,
  JetAtWrongPoint,
  InvalidConfig,
  // frobenius
  ResonantExponents,
  EqualRealParts,
  IntegerCollision,
  SectorBoundary,
  SeriesCapExceeded,
  // edge basis
  CutPointTooLarge,
  PotentialNotIntegrable,
  // weyl forward
  NearEigenvalue,
  SingularMinor,
  BoundaryZero,
  CountOverflow,
  MatrixEvaluatorFailure,
  // inverse reduction
  SingularSigma,
  VanishingDenominator,
  // files
  IoFailure,
};

const char* errc_name(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace starweyl
