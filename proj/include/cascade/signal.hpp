// Direct and cascading polarizations, heterodyne signal and phase bookkeeping.
#ifndef CASCADE_SIGNAL_HPP
#define CASCADE_SIGNAL_HPP

#include "cascade/continuum.hpp"
#include "cascade/discrete.hpp"

#include <iosfwd>
#include <variant>
#include <vector>

namespace cascade {

/// Pluggable molecular response. OffResonant returns constant real
/// susceptibilities; Lorentzian multiplies them by w0^2 / (w0^2 - w^2 - i gamma w).
struct ResponseModel {
  enum class Kind { OffResonant, Lorentzian };

  Kind kind = Kind::OffResonant;
  double chi = 1.0;
  double chi_tilde = 1.0;
  double omega0 = 0.0;
  double gamma = 0.0;
  CVector3 polarization = CVector3::UnitX();

  /// P(k, w).
  CVector3 P(const Vector3& k, double omega) const;
  /// P~(k, w; w').
  Tensor3 P_tilde(const Vector3& k, double omega, double omega_prime) const;

 private:
  Complex lineshape(double omega) const;
};

/// A homogeneous region carries its concentration explicitly.
struct RegionSample {
  ConvexRegion region;
  double concentration = 1.0;
};

using Sample = std::variant<MoleculeCloud, RegionSample>;

enum class Engine { DiscreteSum, Continuum3D, Continuum2D, ContinuumCylinder };

const char* to_string(Engine e) noexcept;

/// P(k_a, w_s) f(k_a - k_s); a region uses n * int_V e^{i dk.r} dr.
CVector3 direct_polarization(const ResponseModel& resp, const Sample& sample, const BeamSet& beams);

struct CascadeOptions {
  KernelKind kernel = KernelKind::Scalar;
  QuadratureSpec quadrature;
  SumOptions sums;
  int z_order = 256;  // cylinder z_a quadrature
};

/// Summed propagator sum_a e^{i dk.r_a} I(r_a) with dk = k_a + k_b - k_s.
/// Continuum engines scale the scalar result to a vector one by the isotropic
/// factor (2/3)(w/c)^2 when kernel == Vector.
Tensor3 cascade_propagator(const Sample& sample, const BeamSet& beams, Engine engine, const KernelConfig& cfg,
                           const CascadeOptions& opts = {});

/// P~(k_a, w_s; -w_b) . G_total . P(k_b, w_b).
CVector3 cascade_polarization(const ResponseModel& resp, const Sample& sample, const BeamSet& beams, Engine engine,
                              const KernelConfig& cfg, const CascadeOptions& opts = {});

/// Im[E_s^* . P].
double heterodyne_signal(const CVector3& E_s, const CVector3& P_total);

struct PhaseReport {
  CVector3 direct = CVector3::Zero();
  CVector3 cascade = CVector3::Zero();
  double rel_phase = 0.0;
  double in_phase_frac = 0.0;
  double out_phase_frac = 0.0;
};

PhaseReport phase_analysis(const CVector3& direct, const CVector3& cascade);

struct MacroscopicCascade {
  Complex pv_part{0.0, 0.0};
  Complex delta_part{0.0, 0.0};
  CVector3 pv_vector = CVector3::Zero();
  CVector3 delta_vector = CVector3::Zero();
  double pv_weight = 0.0;       // k^2 c^2 x / (x^2 + eta^2), x = w^2 - k^2 c^2
  Complex delta_weight{0.0, 0.0};  // -i k^2 c^2 eta / (x^2 + eta^2)
  double eta = 0.0;
};

/// Splits k_b^2 c^2 / (w_b^2 - k_b^2 c^2 + i eta) into its principal-value and
/// delta parts and contracts each with P~ and the transverse part of P(k_b, w_b).
/// The scalar parts are projected on the response polarization.
MacroscopicCascade macroscopic_cascade(const ResponseModel& resp, const BeamSet& beams, double eta);

/// Sweep table with columns sweep_var, re_direct, im_direct, re_cascade,
/// im_cascade, rel_phase, in_frac, out_frac.
void write_phase_csv(std::ostream& out, const std::vector<double>& sweep, const std::vector<PhaseReport>& rows);

}  // namespace cascade

#endif  // CASCADE_SIGNAL_HPP
