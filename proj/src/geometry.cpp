#include "cascade/geometry.hpp"

#include "cascade/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace cascade {

// ---------------------------------------------------------------------------
// MoleculeCloud

MoleculeCloud::MoleculeCloud(std::vector<Vector3> positions, std::optional<double> concentration)
    : positions_(std::move(positions)), concentration_(concentration) {
  if (positions_.empty()) fail(ErrorKind::EmptySample, "molecule cloud is empty");
  for (const auto& p : positions_) {
    if (!p.allFinite()) fail(ErrorKind::PreconditionViolated, "non-finite molecule position");
  }
  std::vector<std::size_t> order(positions_.size());
  std::iota(order.begin(), order.end(), 0);
  auto lex = [this](std::size_t a, std::size_t b) {
    const auto& p = positions_[a];
    const auto& q = positions_[b];
    return std::tie(p.x(), p.y(), p.z()) < std::tie(q.x(), q.y(), q.z());
  };
  std::sort(order.begin(), order.end(), lex);
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (positions_[order[i]] == positions_[order[i - 1]]) {
      fail(ErrorKind::PreconditionViolated, "two molecules share a position");
    }
  }
}

MoleculeCloud MoleculeCloud::translated(const Vector3& shift) const {
  std::vector<Vector3> moved = positions_;
  for (auto& p : moved) p += shift;
  return MoleculeCloud(std::move(moved), concentration_);
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

MoleculeCloud read_cloud_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::IoError, "cloud CSV is empty");
  std::string header;
  for (char ch : line) {
    if (ch != ' ' && ch != '\t' && ch != '\r') header.push_back(ch);
  }
  if (header != "x,y,z") fail(ErrorKind::IoError, "cloud CSV header must be 'x,y,z'");

  std::vector<Vector3> pts;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Vector3 p;
    int col = 0;
    while (std::getline(ss, cell, ',')) {
      if (col >= 3) break;
      try {
        std::size_t used = 0;
        const std::string t = trim(cell);
        p[col] = std::stod(t, &used);
        if (used != t.size()) throw std::invalid_argument(t);
      } catch (const std::exception&) {
        fail(ErrorKind::IoError, "malformed number on CSV line " + std::to_string(lineno));
      }
      ++col;
    }
    if (col != 3) fail(ErrorKind::IoError, "expected 3 columns on CSV line " + std::to_string(lineno));
    pts.push_back(p);
  }
  return MoleculeCloud(std::move(pts));
}

MoleculeCloud read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  return read_cloud_csv(in);
}

void write_cloud_csv(std::ostream& out, const MoleculeCloud& cloud) {
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "x,y,z\n";
  for (const auto& p : cloud.positions()) out << p.x() << ',' << p.y() << ',' << p.z() << '\n';
}

void write_cloud_csv(const std::string& path, const MoleculeCloud& cloud) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::IoError, "cannot write " + path);
  write_cloud_csv(out, cloud);
}

// ---------------------------------------------------------------------------
// ShapeFunction

ShapeFunction::ShapeFunction() : fn_([](double, double) { return 1.0; }), name_("unit"), unit_(true) {}

ShapeFunction::ShapeFunction(Closure fn, std::string name) : fn_(std::move(fn)), name_(std::move(name)) {}

ShapeFunction ShapeFunction::unit() { return {}; }

ShapeFunction ShapeFunction::ellipse(double a, double b) {
  if (!(a > 0 && b > 0)) fail(ErrorKind::PreconditionViolated, "ellipse semi-axes must be positive");
  return {[a, b](double, double phi) {
            const double c = std::cos(phi) / a;
            const double s = std::sin(phi) / b;
            return 1.0 / std::sqrt(c * c + s * s);
          },
          "ellipse"};
}

ShapeFunction ShapeFunction::ellipsoid(double a, double b, double c) {
  if (!(a > 0 && b > 0 && c > 0)) fail(ErrorKind::PreconditionViolated, "ellipsoid semi-axes must be positive");
  return {[a, b, c](double theta, double phi) {
            const Vector3 n = direction(theta, phi);
            const double x = n.x() / a, y = n.y() / b, z = n.z() / c;
            return 1.0 / std::sqrt(x * x + y * y + z * z);
          },
          "ellipsoid"};
}

ShapeFunction ShapeFunction::star(double amplitude, int lobes) {
  if (!(std::abs(amplitude) < 1.0)) fail(ErrorKind::PreconditionViolated, "star amplitude must be < 1");
  return {[amplitude, lobes](double, double phi) { return 1.0 + amplitude * std::cos(lobes * phi); }, "star"};
}

ShapeFunction ShapeFunction::table(std::vector<double> phi_values) {
  if (phi_values.size() < 3) fail(ErrorKind::PreconditionViolated, "shape table needs >= 3 entries");
  for (double v : phi_values) {
    if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::PreconditionViolated, "shape table entries must be positive");
  }
  return {[v = std::move(phi_values)](double, double phi) {
            const auto n = static_cast<double>(v.size());
            double t = phi / kTwoPi * n;
            t -= n * std::floor(t / n);
            auto j = static_cast<std::size_t>(t);
            if (j >= v.size()) j = 0;
            const double f = t - static_cast<double>(j);
            return v[j] * (1.0 - f) + v[(j + 1) % v.size()] * f;
          },
          "table"};
}

ShapeFunction ShapeFunction::table(const Eigen::MatrixXd& grid) {
  if (grid.rows() < 2 || grid.cols() < 3) fail(ErrorKind::PreconditionViolated, "spherical shape table too small");
  if (!(grid.array() > 0.0).all() || !grid.allFinite()) {
    fail(ErrorKind::PreconditionViolated, "shape table entries must be positive");
  }
  return {[g = grid](double theta, double phi) {
            const auto rows = static_cast<double>(g.rows() - 1);
            const auto cols = static_cast<double>(g.cols());
            double ti = std::clamp(theta / kPi, 0.0, 1.0) * rows;
            auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(ti), g.rows() - 2);
            const double fi = ti - static_cast<double>(i);
            double tj = phi / kTwoPi * cols;
            tj -= cols * std::floor(tj / cols);
            auto j = static_cast<Eigen::Index>(tj);
            if (j >= g.cols()) j = 0;
            const double fj = tj - static_cast<double>(j);
            const Eigen::Index j1 = (j + 1) % g.cols();
            const double lo = g(i, j) * (1.0 - fj) + g(i, j1) * fj;
            const double hi = g(i + 1, j) * (1.0 - fj) + g(i + 1, j1) * fj;
            return lo * (1.0 - fi) + hi * fi;
          },
          "table"};
}

// ---------------------------------------------------------------------------
// ConvexRegion

const char* to_string(RegionKind kind) noexcept {
  switch (kind) {
    case RegionKind::Ball3D: return "Ball3D";
    case RegionKind::Disk2D: return "Disk2D";
    case RegionKind::CylinderOnPlane: return "CylinderOnPlane";
  }
  return "Unknown";
}

ConvexRegion ConvexRegion::ball(double R, Vector3 center, ShapeFunction shape) {
  ConvexRegion r{RegionKind::Ball3D, center, std::move(shape), R, 0.0};
  r.validate();
  return r;
}

ConvexRegion ConvexRegion::disk(double R, Vector3 center, ShapeFunction shape) {
  ConvexRegion r{RegionKind::Disk2D, center, std::move(shape), R, 0.0};
  r.validate();
  return r;
}

ConvexRegion ConvexRegion::cylinder(double R, double l, Vector3 center, ShapeFunction shape) {
  ConvexRegion r{RegionKind::CylinderOnPlane, center, std::move(shape), R, l};
  r.validate();
  return r;
}

void ConvexRegion::validate() const {
  if (!(size_R > 0.0) || !std::isfinite(size_R)) fail(ErrorKind::PreconditionViolated, "region size R must be positive");
  if (kind == RegionKind::CylinderOnPlane && !(thickness_l > 0.0)) {
    fail(ErrorKind::PreconditionViolated, "cylinder thickness l must be positive");
  }
  if (!center.allFinite()) fail(ErrorKind::PreconditionViolated, "region centre must be finite");
  // Spot-check positivity of xi.
  for (int i = 0; i < 64; ++i) {
    const double phi = kTwoPi * i / 64.0;
    for (double theta : {0.0, 0.25 * kPi, 0.5 * kPi, 0.75 * kPi, kPi}) {
      const double xi = shape(theta, phi);
      if (!(xi > 0.0) || !std::isfinite(xi)) fail(ErrorKind::PreconditionViolated, "shape function xi must be positive");
    }
  }
}

namespace {

bool planar(RegionKind k) { return k != RegionKind::Ball3D; }

// Offset from the region centre in the frame where xi is defined.
Vector3 local_offset(const ConvexRegion& reg, const Vector3& p) {
  Vector3 d = p - reg.center;
  if (planar(reg.kind)) d.z() = 0.0;
  return d;
}

double xi_towards(const ConvexRegion& reg, const Vector3& d) {
  const double phi = std::atan2(d.y(), d.x());
  if (planar(reg.kind)) return reg.shape(phi);
  const double theta = std::acos(std::clamp(d.z() / d.norm(), -1.0, 1.0));
  return reg.shape(theta, phi);
}

}  // namespace

bool ConvexRegion::contains(const Vector3& p, double rel_tol) const {
  if (kind == RegionKind::Disk2D && std::abs(p.z() - center.z()) > 1e-9 * size_R) return false;
  if (kind == RegionKind::CylinderOnPlane) {
    const double tol = rel_tol * thickness_l;
    if (p.z() < -tol || p.z() > thickness_l + tol) return false;
  }
  const Vector3 d = local_offset(*this, p);
  const double r = d.norm();
  if (r == 0.0) return true;
  return r <= xi_towards(*this, d) * size_R * (1.0 + rel_tol);
}

double ConvexRegion::boundary_distance(const Vector3& origin, const Vector3& dir) const {
  Vector3 u = dir;
  if (planar(kind)) u.z() = 0.0;
  const double un = u.norm();
  if (un == 0.0) fail(ErrorKind::PreconditionViolated, "boundary_distance: zero direction");
  u /= un;
  const Vector3 d = local_offset(*this, origin);
  if (d.norm() == 0.0) return xi_towards(*this, u) * size_R;
  if (shape.is_unit()) {
    const double du = d.dot(u);
    const double disc = du * du - d.squaredNorm() + size_R * size_R;
    if (disc < 0.0 || d.norm() > size_R * (1.0 + 1e-12)) fail(ErrorKind::OutsideRegion, "point outside region");
    return -du + std::sqrt(disc);
  }
  auto f = [&](double t) {
    const Vector3 q = d + t * u;
    const double r = q.norm();
    if (r == 0.0) return -size_R;
    return r - xi_towards(*this, q) * size_R;
  };
  if (f(0.0) > 1e-12 * size_R) fail(ErrorKind::OutsideRegion, "point outside region");
  double hi = 2.0 * xi_towards(*this, u) * size_R + d.norm();
  for (int i = 0; i < 60 && f(hi) <= 0.0; ++i) hi *= 2.0;
  return bisect(f, 0.0, hi, 1e-15);
}

double ConvexRegion::measure() const {
  const double R = size_R;
  switch (kind) {
    case RegionKind::Ball3D: {
      if (shape.is_unit()) return 4.0 / 3.0 * kPi * R * R * R;
      const double s = integrate_gl(
          [&](double theta) {
            return std::sin(theta) * integrate_periodic(
                                         [&](double phi) { return std::pow(shape(theta, phi), 3); }, 512);
          },
          0.0, kPi, 256);
      return s * R * R * R / 3.0;
    }
    case RegionKind::Disk2D:
    case RegionKind::CylinderOnPlane: {
      double area = kPi * R * R;
      if (!shape.is_unit()) {
        area = 0.5 * R * R * integrate_periodic([&](double phi) { return std::pow(shape(phi), 2); }, 4096);
      }
      return kind == RegionKind::Disk2D ? area : area * thickness_l;
    }
  }
  return 0.0;
}

double ConvexRegion::bounding_radius() const {
  if (shape.is_unit()) return size_R;
  double m = 0.0;
  if (planar(kind)) {
    for (int j = 0; j < 4096; ++j) m = std::max(m, shape(kTwoPi * j / 4096.0));
  } else {
    for (int i = 0; i <= 180; ++i) {
      for (int j = 0; j < 360; ++j) m = std::max(m, shape(kPi * i / 180.0, kTwoPi * j / 360.0));
    }
  }
  return 1.02 * m * size_R;
}

// ---------------------------------------------------------------------------
// Measures and convexity

double polar_measure(const ConvexRegion& region, double r, double phi) {
  if (region.kind != RegionKind::Disk2D) fail(ErrorKind::KindMismatch, "polar_measure requires a Disk2D region");
  if (r < 0.0 || r > 1.0) fail(ErrorKind::PreconditionViolated, "polar_measure: r must lie in [0, 1]");
  const double xi = region.shape(phi);
  return xi * xi * r;
}

double spherical_measure(const ConvexRegion& region, double r, double theta, double phi) {
  if (region.kind != RegionKind::Ball3D) fail(ErrorKind::KindMismatch, "spherical_measure requires a Ball3D region");
  if (r < 0.0 || r > 1.0) fail(ErrorKind::PreconditionViolated, "spherical_measure: r must lie in [0, 1]");
  if (theta < 0.0 || theta > kPi) fail(ErrorKind::PreconditionViolated, "spherical_measure: theta outside [0, pi]");
  const double xi = region.shape(theta, phi);
  return xi * xi * xi * r * r * std::sin(theta);
}

bool check_convexity(const ConvexRegion& region, int n_samples, double rel_tol) {
  if (n_samples < 8) fail(ErrorKind::PreconditionViolated, "check_convexity needs n_samples >= 8");
  std::vector<Vector3> boundary;
  boundary.reserve(n_samples);
  if (planar(region.kind)) {
    for (int i = 0; i < n_samples; ++i) {
      const double phi = kTwoPi * i / n_samples;
      boundary.emplace_back(region.shape(phi) * region.size_R * Vector3(std::cos(phi), std::sin(phi), 0.0));
    }
  } else {
    // Fibonacci lattice on the sphere.
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n_samples; ++i) {
      const double z = 1.0 - 2.0 * (i + 0.5) / n_samples;
      const double theta = std::acos(z);
      const double phi = std::fmod(golden * i, kTwoPi);
      boundary.emplace_back(region.shape(theta, phi) * region.size_R * direction(theta, phi));
    }
  }
  ConvexRegion local = region;
  local.center = Vector3::Zero();
  for (std::size_t i = 0; i < boundary.size(); ++i) {
    for (std::size_t j = i + 1; j < boundary.size(); ++j) {
      const Vector3 m = 0.5 * (boundary[i] + boundary[j]);
      const double r = m.norm();
      if (r == 0.0) continue;
      if (r > xi_towards(local, m) * region.size_R * (1.0 + rel_tol)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Sampling

namespace {

Vector3 random_unit_vector(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double z = 2.0 * u(rng) - 1.0;
  const double phi = kTwoPi * u(rng);
  const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
  return {s * std::cos(phi), s * std::sin(phi), z};
}

Vector3 sample_uniform(const ConvexRegion& reg, double B, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double R = reg.size_R;
  const Vector3& c = reg.center;
  switch (reg.kind) {
    case RegionKind::Ball3D: {
      if (reg.shape.is_unit()) return c + R * std::cbrt(u(rng)) * random_unit_vector(rng);
      for (;;) {
        const Vector3 p = c + B * Vector3(2 * u(rng) - 1, 2 * u(rng) - 1, 2 * u(rng) - 1);
        if (reg.contains(p, 0.0)) return p;
      }
    }
    case RegionKind::Disk2D:
    case RegionKind::CylinderOnPlane: {
      Vector3 p;
      if (reg.shape.is_unit()) {
        const double r = R * std::sqrt(u(rng));
        const double phi = kTwoPi * u(rng);
        p = Vector3(c.x() + r * std::cos(phi), c.y() + r * std::sin(phi), c.z());
      } else {
        ConvexRegion flat = reg;
        flat.kind = RegionKind::Disk2D;
        for (;;) {
          p = Vector3(c.x() + B * (2 * u(rng) - 1), c.y() + B * (2 * u(rng) - 1), c.z());
          if (flat.contains(p, 0.0)) break;
        }
      }
      if (reg.kind == RegionKind::CylinderOnPlane) p.z() = reg.thickness_l * u(rng);
      return p;
    }
  }
  return c;
}

}  // namespace

MoleculeCloud sample_points(const ConvexRegion& region, std::size_t count, std::uint64_t seed, SamplingMode mode) {
  if (count == 0) fail(ErrorKind::EmptySample, "sample_points: count must be >= 1");
  region.validate();
  std::vector<Vector3> pts;
  pts.reserve(count);
  const double measure = region.measure();

  if (mode == SamplingMode::UniformRandom) {
    std::mt19937_64 rng(seed);
    const double B = region.bounding_radius();
    for (std::size_t i = 0; i < count; ++i) pts.push_back(sample_uniform(region, B, rng));
  } else {
    const int dim = region.kind == RegionKind::Disk2D ? 2 : 3;
    const double a = std::pow(measure / static_cast<double>(count), 1.0 / dim);
    const double B = region.bounding_radius();
    const int n = static_cast<int>(std::ceil(B / a)) + 1;
    const Vector3& c = region.center;
    if (region.kind == RegionKind::CylinderOnPlane) {
      const int nz = static_cast<int>(std::floor(region.thickness_l / a));
      for (int i = -n; i < n; ++i)
        for (int j = -n; j < n; ++j)
          for (int k = 0; k < std::max(nz, 1); ++k) {
            const Vector3 p(c.x() + (i + 0.5) * a, c.y() + (j + 0.5) * a,
                            nz > 0 ? (k + 0.5) * a : 0.5 * region.thickness_l);
            if (region.contains(p, 0.0)) pts.push_back(p);
          }
    } else if (dim == 2) {
      for (int i = -n; i < n; ++i)
        for (int j = -n; j < n; ++j) {
          const Vector3 p(c.x() + (i + 0.5) * a, c.y() + (j + 0.5) * a, c.z());
          if (region.contains(p, 0.0)) pts.push_back(p);
        }
    } else {
      for (int i = -n; i < n; ++i)
        for (int j = -n; j < n; ++j)
          for (int k = -n; k < n; ++k) {
            const Vector3 p = c + a * Vector3(i + 0.5, j + 0.5, k + 0.5);
            if (region.contains(p, 0.0)) pts.push_back(p);
          }
    }
    if (pts.empty()) pts.push_back(region.kind == RegionKind::CylinderOnPlane
                                       ? Vector3(c.x(), c.y(), 0.5 * region.thickness_l)
                                       : c);
  }
  const double n_conc = static_cast<double>(pts.size()) / measure;
  return MoleculeCloud(std::move(pts), n_conc);
}

}  // namespace cascade
