// Shared types, constants and error reporting for the cascade library.
#ifndef CASCADE_COMMON_HPP
#define CASCADE_COMMON_HPP

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace cascade {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;

template <typename Scalar>
using CVec3 = Eigen::Matrix<std::complex<Scalar>, 3, 1>;

/// 3x3 complex Cartesian tensor G^{nu nu'}.
template <typename Scalar>
using ComplexTensor3 = Eigen::Matrix<std::complex<Scalar>, 3, 3>;

using Vector3 = Vec3<double>;
using CVector3 = CVec3<double>;
using Tensor3 = ComplexTensor3<double>;
using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

enum class ErrorKind {
  KindMismatch,
  EmptySample,
  SingularSeparation,
  ResonanceSingularity,
  InvalidHalfSpace,
  PreconditionViolated,
  OutsideRegion,
  SaddleNotFound,
  DegenerateSaddle,
  InsufficientBodies,
  ResponseDomainError,
  EngineMismatch,
  DegenerateReference,
  ConfigError,
  IoError,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

/// Maps an angle onto (-pi, pi].
inline double wrap_angle(double a) {
  a = std::remainder(a, kTwoPi);
  if (a <= -kPi) a += kTwoPi;
  return a;
}

}  // namespace cascade

#endif  // CASCADE_COMMON_HPP
