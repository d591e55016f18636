// Classical driving-field wavevectors and frequencies.
#ifndef CASCADE_BEAMS_HPP
#define CASCADE_BEAMS_HPP

#include "cascade/common.hpp"

namespace cascade {

struct BeamSet {
  Vector3 k_a = Vector3::Zero();
  Vector3 k_b = Vector3::Zero();
  Vector3 k_s = Vector3::Zero();
  double omega_s = 1.0;
  double omega_b = 1.0;
  double c = 1.0;

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorKind::PreconditionViolated, "beam c must be positive");
    if (!std::isfinite(omega_s) || !std::isfinite(omega_b)) fail(ErrorKind::PreconditionViolated, "non-finite frequency");
    if (!k_a.allFinite() || !k_b.allFinite() || !k_s.allFinite()) {
      fail(ErrorKind::PreconditionViolated, "non-finite wavevector");
    }
  }

  /// |omega_b / c - |k_b||, zero for a phase-matched internal mode.
  double mismatch() const { return std::abs(omega_b / c - k_b.norm()); }

  /// k_a + k_b - k_s, the wavevector the cascading term is phase matched on.
  Vector3 cascade_dk() const { return k_a + k_b - k_s; }
};

}  // namespace cascade

#endif  // CASCADE_BEAMS_HPP
