#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace scatterlax {

using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kFourPi = 4.0 * kPi;

inline constexpr const char* kVersion = "0.1.0";

enum class ErrorCode {
  SingleScatterer,
  CapacitanceUnavailable,
  NonPositiveRadius,
  NonPositive,
  SingularSystem,
  OpenSurface,
  MeshTooCoarse,
  CoincidentCenters,
  SingularMatrix,
  LevelOutOfRange,
  NonSphereScatterer,
  SystemTooLarge,
  ResonanceRisk,
  SeriesNotConverged,
  DegreeTooSmall,
  RankDeficientAmbiguity,
  IllConditionedH,
  EmptyGrid,
  TooManyScatterers,
  InvalidScene,
  IoError,
  BadFormat,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(std::string(error_name(code)) + ": " + msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

}  // namespace scatterlax
