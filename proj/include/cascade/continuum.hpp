// Continuum integrated Green's function for a ball, a planar disk and a
// cylinder above a reflecting plane, plus closed-form references and the
// stationary-phase estimate of the 2D boundary term.
#ifndef CASCADE_CONTINUUM_HPP
#define CASCADE_CONTINUUM_HPP

#include "cascade/beams.hpp"
#include "cascade/geometry.hpp"
#include "cascade/kernels.hpp"

#include <string>
#include <vector>

namespace cascade {

/// Orders are starting points; each refinement doubles them.
struct QuadratureSpec {
  int angular_order = 64;
  int radial_order = 64;  // z-quadrature for the cylinder
  double refinement_tol = 1e-8;
  int max_refinements = 6;
  bool compute_boundary = true;
  bool numeric_z = false;  // cylinder: integrate z numerically instead of the sinc closed form

  void validate() const;
};

enum class ContinuumCase { Convex3D, Convex2D, Cylinder };

const char* to_string(ContinuumCase c) noexcept;

struct ContinuumResult {
  Complex value{0.0, 0.0};
  Complex boundary_term{0.0, 0.0};
  double est_error = 0.0;
  ContinuumCase kind = ContinuumCase::Convex3D;
  std::vector<Complex> terms;          // cylinder: direct-below, direct-above, image
  std::vector<std::string> warnings;   // e.g. r_a within a wavelength of the boundary
};

/// Ball: value = -norm * int dOmega 1/A^2 with A = w/c + k_b.n; boundary_term is
/// the oscillatory surface remainder.
ContinuumResult integrate_case_3d(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                  const QuadratureSpec& q = {}, const KernelConfig& cfg = {});

/// -4 pi / ((w/c)^2 - k^2).
Complex analytic_3d(double k_b, double omega_b, double c = 1.0);

/// Disk: value = I0 = i norm int dphi / A, boundary_term = I1.
ContinuumResult integrate_case_2d(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                  const QuadratureSpec& q = {}, const KernelConfig& cfg = {});

/// -i / sqrt((w/c)^2 - k^2).
Complex analytic_2d(double k_b, double omega_b, double c = 1.0);

/// Cylinder on the reflecting plane z = 0, k_b along z.
ContinuumResult integrate_cylinder(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                   const QuadratureSpec& q = {}, const KernelConfig& cfg = {});

/// 2 pi i (c/w) z_a e^{i k_b z_a}.
Complex analytic_cylinder_matched(double z_a, double k_b, double omega_b, double c = 1.0);

/// Stationary-phase value of the disk boundary term I1, summed over all
/// stationary points of S(phi) = A(phi) * rho(phi).
Complex boundary_saddle_estimate(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                 const KernelConfig& cfg = {});

/// Geometric form factor int_V e^{i k.r} dr (area for a disk).
Complex continuum_form_factor(const ConvexRegion& region, const Vector3& k, int angular_order = 256);

}  // namespace cascade

#endif  // CASCADE_CONTINUUM_HPP
