// Discrete molecule clouds, parametric convex regions and their
// inhomogeneous polar/spherical integration measures.
#ifndef CASCADE_GEOMETRY_HPP
#define CASCADE_GEOMETRY_HPP

#include "cascade/common.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace cascade {

/// Explicit list of molecular positions.
///
/// Positions are finite and pairwise distinct; the cloud is never empty.
class MoleculeCloud {
 public:
  explicit MoleculeCloud(std::vector<Vector3> positions,
                         std::optional<double> concentration = std::nullopt);

  const std::vector<Vector3>& positions() const { return positions_; }
  std::size_t size() const { return positions_.size(); }
  const Vector3& operator[](std::size_t i) const { return positions_[i]; }

  std::optional<double> concentration() const { return concentration_; }
  void set_concentration(std::optional<double> n) { concentration_ = n; }

  /// Rigid translation of every molecule.
  MoleculeCloud translated(const Vector3& shift) const;

 private:
  std::vector<Vector3> positions_;
  std::optional<double> concentration_;
};

/// CSV with header "x,y,z", one molecule per row.
MoleculeCloud read_cloud_csv(std::istream& in);
MoleculeCloud read_cloud_csv(const std::string& path);
void write_cloud_csv(std::ostream& out, const MoleculeCloud& cloud);
void write_cloud_csv(const std::string& path, const MoleculeCloud& cloud);

/// Dimensionless radius function xi(theta, phi) of a region about its centre.
///
/// Either an analytic closure or a table on a uniform angular grid with
/// linear interpolation (periodic in phi). Planar shapes ignore theta.
class ShapeFunction {
 public:
  using Closure = std::function<double(double theta, double phi)>;

  ShapeFunction();  // xi == 1
  ShapeFunction(Closure fn, std::string name);

  static ShapeFunction unit();
  static ShapeFunction ellipse(double a, double b);
  static ShapeFunction ellipsoid(double a, double b, double c);
  static ShapeFunction star(double amplitude, int lobes);
  /// Planar table: values at phi_j = 2 pi j / n.
  static ShapeFunction table(std::vector<double> phi_values);
  /// Spherical table: rows are theta_i = pi i / (rows - 1), columns phi_j = 2 pi j / cols.
  static ShapeFunction table(const Eigen::MatrixXd& theta_phi_values);

  double operator()(double theta, double phi) const { return fn_(theta, phi); }
  double operator()(double phi) const { return fn_(0.5 * kPi, phi); }

  const std::string& name() const { return name_; }
  bool is_unit() const { return unit_; }

 private:
  Closure fn_;
  std::string name_;
  bool unit_ = false;
};

enum class RegionKind { Ball3D, Disk2D, CylinderOnPlane };

const char* to_string(RegionKind kind) noexcept;

/// Convex sample region {r : |r - centre| <= xi(direction) * R}.
///
/// Disk2D lies in the plane z = centre.z. CylinderOnPlane has the planar
/// cross-section about (centre.x, centre.y) and spans 0 <= z <= l above the
/// reflecting plane z = 0.
struct ConvexRegion {
  RegionKind kind = RegionKind::Ball3D;
  Vector3 center = Vector3::Zero();
  ShapeFunction shape;
  double size_R = 1.0;
  double thickness_l = 0.0;

  static ConvexRegion ball(double R, Vector3 center = Vector3::Zero(),
                           ShapeFunction shape = {});
  static ConvexRegion disk(double R, Vector3 center = Vector3::Zero(),
                           ShapeFunction shape = {});
  static ConvexRegion cylinder(double R, double l, Vector3 center = Vector3::Zero(),
                               ShapeFunction shape = {});

  /// Throws PreconditionViolated when R <= 0 or l <= 0 for a cylinder.
  void validate() const;

  bool contains(const Vector3& p, double rel_tol = 1e-12) const;

  /// Distance from an interior point to the boundary along a unit direction.
  /// Planar kinds use the in-plane part of the direction.
  double boundary_distance(const Vector3& origin, const Vector3& direction) const;

  /// Volume (Ball3D, CylinderOnPlane) or area (Disk2D).
  double measure() const;

  /// Largest xi * R over a dense angular scan, padded by a small margin.
  double bounding_radius() const;
};

/// xi^2(phi) * r, the inhomogeneous polar measure (multiply by dr dphi).
double polar_measure(const ConvexRegion& region, double r, double phi);

/// xi^3(theta, phi) * r^2 * sin(theta) (multiply by dr dtheta dphi).
double spherical_measure(const ConvexRegion& region, double r, double theta, double phi);

/// Midpoint-chord convexity test on n_samples boundary points.
bool check_convexity(const ConvexRegion& region, int n_samples, double rel_tol = 1e-6);

enum class SamplingMode { UniformRandom, Lattice };

/// Points inside the region. UniformRandom is reproducible for a given seed;
/// Lattice places a cubic (square) lattice sized to roughly `count` points.
MoleculeCloud sample_points(const ConvexRegion& region, std::size_t count,
                            std::uint64_t seed, SamplingMode mode);

/// Unit vector for polar angles.
inline Vector3 direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi), std::cos(theta)};
}

}  // namespace cascade

#endif  // CASCADE_GEOMETRY_HPP
