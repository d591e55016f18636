#include "cascade/continuum.hpp"

#include "cascade/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace cascade {

void QuadratureSpec::validate() const {
  if (angular_order < 4 || radial_order < 4) fail(ErrorKind::ConfigError, "quadrature orders must be >= 4");
  if (!(refinement_tol > 0.0)) fail(ErrorKind::ConfigError, "refinement_tol must be positive");
  if (max_refinements < 0) fail(ErrorKind::ConfigError, "max_refinements must be >= 0");
}

const char* to_string(ContinuumCase c) noexcept {
  switch (c) {
    case ContinuumCase::Convex3D: return "Convex3D";
    case ContinuumCase::Convex2D: return "Convex2D";
    case ContinuumCase::Cylinder: return "Cylinder";
  }
  return "Unknown";
}

namespace {

constexpr Complex kI{0.0, 1.0};

void require_kind(const ConvexRegion& region, RegionKind kind) {
  if (region.kind != kind) {
    fail(ErrorKind::KindMismatch, std::string("expected ") + to_string(kind) + ", got " + to_string(region.kind));
  }
}

void require_inside(const ConvexRegion& region, const Vector3& r_a) {
  if (!region.contains(r_a, 1e-12)) fail(ErrorKind::OutsideRegion, "r_a lies outside the region");
}

// Warn when r_a sits within one wavelength of the boundary.
void proximity_warning(const ConvexRegion& region, const Vector3& r_a, double q, std::vector<std::string>& w) {
  const double lambda = kTwoPi / q;
  double dmin = std::numeric_limits<double>::infinity();
  if (region.kind == RegionKind::Ball3D) {
    for (int i = 0; i < 24; ++i) {
      const double theta = kPi * (i + 0.5) / 24;
      for (int j = 0; j < 48; ++j) {
        dmin = std::min(dmin, region.boundary_distance(r_a, direction(theta, kTwoPi * j / 48)));
      }
    }
  } else {
    for (int j = 0; j < 96; ++j) {
      const double phi = kTwoPi * j / 96;
      dmin = std::min(dmin, region.boundary_distance(r_a, Vector3(std::cos(phi), std::sin(phi), 0.0)));
    }
    if (region.kind == RegionKind::CylinderOnPlane) {
      dmin = std::min({dmin, r_a.z(), region.thickness_l - r_a.z()});
    }
  }
  if (dmin < lambda) w.push_back("r_a is within one wavelength of the boundary");
}

template <typename Level>
void refine(Level&& level, int n0, const QuadratureSpec& q, Complex& value, Complex& boundary, double& err) {
  int n = n0;
  auto prev = level(n);
  for (int it = 0;; ++it) {
    n *= 2;
    auto next = level(n);
    err = std::max(std::abs(next.first - prev.first), std::abs(next.second - prev.second));
    prev = next;
    const double scale = std::abs(next.first) + std::abs(next.second);
    if (err <= q.refinement_tol * scale || it + 1 >= std::max(1, q.max_refinements)) break;
  }
  value = prev.first;
  boundary = prev.second;
}

}  // namespace

ContinuumResult integrate_case_3d(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                  const QuadratureSpec& qs, const KernelConfig& cfg) {
  require_kind(region, RegionKind::Ball3D);
  qs.validate();
  cfg.validate();
  const double q = beams.omega_b / cfg.c;
  const Vector3 kb = beams.k_b;
  if (!(kb.norm() < q)) fail(ErrorKind::PreconditionViolated, "requires |k_b| < omega_b / c");
  require_inside(region, r_a);

  ContinuumResult res;
  res.kind = ContinuumCase::Convex3D;
  proximity_warning(region, r_a, q, res.warnings);
  const double nu = norm_factor<double>(cfg.norm_or(Normalization::Bare));
  const double reach = region.bounding_radius() + (r_a - region.center).norm();

  auto level = [&](int n) {
    const GaussRule& rule = gauss_legendre(n);
    const int n_phi = 2 * n;
    const double h = kTwoPi / n_phi;
    KahanSum<Complex> bulk(Complex{});
    KahanSum<Complex> edge(Complex{});
    for (int i = 0; i < n; ++i) {
      const double ct = rule.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < n_phi; ++j) {
        const double phi = h * j;
        const Vector3 dir(st * std::cos(phi), st * std::sin(phi), ct);
        const double A = q + kb.dot(dir);
        const double w = rule.weights[i] * h;
        bulk.add(Complex(w / (A * A)));
        if (qs.compute_boundary) {
          const double P = region.boundary_distance(r_a, dir);
          edge.add(w * std::polar(1.0, P * A) * Complex(1.0 / (A * A), -P / A));
        }
      }
    }
    return std::pair<Complex, Complex>{-nu * bulk.value(), nu * edge.value()};
  };
  const int n0 = std::max(qs.angular_order, static_cast<int>(std::ceil((q + kb.norm()) * reach)) / 2 + 32);
  refine(level, n0, qs, res.value, res.boundary_term, res.est_error);
  return res;
}

Complex analytic_3d(double k_b, double omega_b, double c) {
  const double q = omega_b / c;
  const double den = q * q - k_b * k_b;
  if (den == 0.0) fail(ErrorKind::ResonanceSingularity, "k_b = omega_b / c");
  return {-4.0 * kPi / den, 0.0};
}

ContinuumResult integrate_case_2d(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                  const QuadratureSpec& qs, const KernelConfig& cfg) {
  require_kind(region, RegionKind::Disk2D);
  qs.validate();
  cfg.validate();
  const double q = beams.omega_b / cfg.c;
  const Vector3 kp(beams.k_b.x(), beams.k_b.y(), 0.0);
  if (!(kp.norm() < q)) fail(ErrorKind::PreconditionViolated, "requires |k_b,parallel| < omega_b / c");
  require_inside(region, r_a);

  ContinuumResult res;
  res.kind = ContinuumCase::Convex2D;
  proximity_warning(region, r_a, q, res.warnings);
  const double nu = norm_factor<double>(cfg.norm_or(Normalization::Bare));
  const double reach = region.bounding_radius() + (r_a - region.center).norm();

  auto level = [&](int n) {
    const double h = kTwoPi / n;
    KahanSum<Complex> bulk(Complex{});
    KahanSum<Complex> edge(Complex{});
    for (int j = 0; j < n; ++j) {
      const double phi = h * j;
      const Vector3 dir(std::cos(phi), std::sin(phi), 0.0);
      const double A = q + kp.dot(dir);
      bulk.add(Complex(h / A));
      if (qs.compute_boundary) {
        const double P = region.boundary_distance(r_a, dir);
        edge.add(h * std::polar(1.0, P * A) / A);
      }
    }
    return std::pair<Complex, Complex>{kI * nu * bulk.value(), -kI * nu * edge.value()};
  };
  const int n0 = std::max(qs.angular_order, 2 * static_cast<int>(std::ceil((q + kp.norm()) * reach)) + 64);
  refine(level, n0, qs, res.value, res.boundary_term, res.est_error);
  return res;
}

Complex analytic_2d(double k_b, double omega_b, double c) {
  const double q = omega_b / c;
  const double den = q * q - k_b * k_b;
  if (den == 0.0) fail(ErrorKind::ResonanceSingularity, "k_b = omega_b / c");
  if (den < 0.0) fail(ErrorKind::PreconditionViolated, "requires k_b < omega_b / c");
  return {0.0, -1.0 / std::sqrt(den)};
}

ContinuumResult integrate_cylinder(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                   const QuadratureSpec& qs, const KernelConfig& cfg) {
  require_kind(region, RegionKind::CylinderOnPlane);
  qs.validate();
  cfg.validate();
  const Vector3& kb = beams.k_b;
  if (std::hypot(kb.x(), kb.y()) > 1e-12 * std::max(1.0, kb.norm())) {
    fail(ErrorKind::PreconditionViolated, "k_b must point along z");
  }
  const double l = region.thickness_l;
  const double za = r_a.z();
  if (!(za > 0.0 && za < l)) fail(ErrorKind::OutsideRegion, "requires 0 < z_a < l");
  require_inside(region, r_a);

  const double q = beams.omega_b / cfg.c;
  const double k = kb.z();
  const double nu = norm_factor<double>(cfg.norm_or(Normalization::Bare));
  const Complex pref = nu * kTwoPi * kI / q;

  ContinuumResult res;
  res.kind = ContinuumCase::Cylinder;
  proximity_warning(region, r_a, q, res.warnings);

  Complex t1, t2, t3;
  if (!qs.numeric_z) {
    const double m = q - k;
    const double p = q + k;
    t1 = za * std::polar(1.0, 0.5 * m * za) * sinc(0.5 * m * za);
    t2 = (l - za) * std::polar(1.0, 0.5 * p * (l - za)) * sinc(0.5 * p * (l - za));
    t3 = -std::polar(1.0, m * za) * l * std::polar(1.0, 0.5 * p * l) * sinc(0.5 * p * l);
    res.est_error = 1e-14 * std::abs(pref) * l;
  } else {
    auto zlevel = [&](int n) {
      auto below = [&](double zb) { return std::polar(1.0, k * (zb - za) + q * (za - zb)); };
      auto above = [&](double zb) { return std::polar(1.0, k * (zb - za) + q * (zb - za)); };
      auto image = [&](double zb) { return -std::polar(1.0, k * (zb - za) + q * (za + zb)); };
      return std::array<Complex, 3>{integrate_gl(below, 0.0, za, n), integrate_gl(above, za, l, n),
                                    integrate_gl(image, 0.0, l, n)};
    };
    int n = std::max(qs.radial_order, static_cast<int>(std::ceil((q + std::abs(k)) * l)) / 2 + 32);
    auto prev = zlevel(n);
    double err = 0.0;
    for (int it = 0; it < std::max(1, qs.max_refinements); ++it) {
      n *= 2;
      auto next = zlevel(n);
      err = 0.0;
      for (int i = 0; i < 3; ++i) err += std::abs(next[i] - prev[i]);
      prev = next;
      if (err <= qs.refinement_tol * (std::abs(next[0]) + std::abs(next[1]) + std::abs(next[2]))) break;
    }
    t1 = prev[0];
    t2 = prev[1];
    t3 = prev[2];
    res.est_error = std::abs(pref) * err;
  }
  res.terms = {pref * t1, pref * t2, pref * t3};
  res.value = res.terms[0] + res.terms[1] + res.terms[2];

  if (qs.compute_boundary) {
    // Cross-section remainders: int dphi e^{i q sqrt(P^2 + Z^2)} / (i q), direct minus image.
    const Vector3 foot(r_a.x(), r_a.y(), region.center.z());
    const double reach = region.bounding_radius() + std::hypot(r_a.x() - region.center.x(), r_a.y() - region.center.y());
    auto blevel = [&](int n_phi, int n_z) {
      const double h = kTwoPi / n_phi;
      std::vector<double> P2(n_phi);
      for (int j = 0; j < n_phi; ++j) {
        const double phi = h * j;
        const double P = region.boundary_distance(foot, Vector3(std::cos(phi), std::sin(phi), 0.0));
        P2[j] = P * P;
      }
      auto cross = [&](double Z) {
        KahanSum<Complex> s(Complex{});
        for (int j = 0; j < n_phi; ++j) s.add(std::polar(h, q * std::sqrt(P2[j] + Z * Z)));
        return s.value() / (kI * q);
      };
      auto f = [&](double zb) { return std::polar(1.0, k * (zb - za)) * (cross(za - zb) - cross(za + zb)); };
      const Complex v = integrate_gl(f, 0.0, za, n_z) + integrate_gl(f, za, l, n_z);
      return std::pair<Complex, Complex>{v, Complex{}};
    };
    int n_phi = std::max(qs.angular_order, 2 * static_cast<int>(std::ceil(q * reach)) + 64);
    int n_z = std::max(qs.radial_order, static_cast<int>(std::ceil((q + std::abs(k)) * l)) / 2 + 32);
    auto prev = blevel(n_phi, n_z);
    double err = 0.0;
    for (int it = 0; it < std::max(1, std::min(qs.max_refinements, 2)); ++it) {
      n_phi *= 2;
      n_z *= 2;
      auto next = blevel(n_phi, n_z);
      err = std::abs(next.first - prev.first);
      prev = next;
      if (err <= qs.refinement_tol * std::abs(next.first)) break;
    }
    res.boundary_term = nu * prev.first;
    res.est_error = std::max(res.est_error, nu * err);
  }
  return res;
}

Complex analytic_cylinder_matched(double z_a, double k_b, double omega_b, double c) {
  if (!(z_a > 0.0)) fail(ErrorKind::PreconditionViolated, "z_a must be positive");
  return kTwoPi * kI * (c / omega_b) * z_a * std::polar(1.0, k_b * z_a);
}

Complex boundary_saddle_estimate(const ConvexRegion& region, const Vector3& r_a, const BeamSet& beams,
                                 const KernelConfig& cfg) {
  require_kind(region, RegionKind::Disk2D);
  cfg.validate();
  require_inside(region, r_a);
  const double q = beams.omega_b / cfg.c;
  const Vector3 kp(beams.k_b.x(), beams.k_b.y(), 0.0);
  const double nu = norm_factor<double>(cfg.norm_or(Normalization::Bare));

  auto dir = [](double phi) { return Vector3(std::cos(phi), std::sin(phi), 0.0); };
  auto A = [&](double phi) { return q + kp.dot(dir(phi)); };
  auto S = [&](double phi) { return A(phi) * region.boundary_distance(r_a, dir(phi)); };
  const double hd = 1e-6;
  auto dS = [&](double phi) { return (S(phi + hd) - S(phi - hd)) / (2.0 * hd); };

  constexpr int kScan = 1000;
  std::vector<double> grid(kScan + 1), d(kScan + 1);
  double dmax = 0.0, smax = 0.0;
  for (int j = 0; j <= kScan; ++j) {
    grid[j] = kTwoPi * (j + 0.5) / kScan;
    d[j] = dS(grid[j]);
    dmax = std::max(dmax, std::abs(d[j]));
    smax = std::max(smax, std::abs(S(grid[j])));
  }
  if (dmax <= 1e-9 * std::max(1.0, smax)) fail(ErrorKind::DegenerateSaddle, "phase is stationary everywhere");

  Complex est{};
  int found = 0;
  for (int j = 0; j < kScan; ++j) {
    if ((d[j] > 0.0) == (d[j + 1] > 0.0) && d[j] != 0.0) continue;
    if (d[j + 1] == 0.0) continue;  // picked up as the left end of the next bracket
    const double phi0 = bisect(dS, grid[j], grid[j + 1], 1e-14);
    const double h2 = 1e-4;
    const double lam = (S(phi0 + h2) - 2.0 * S(phi0) + S(phi0 - h2)) / (h2 * h2);
    if (std::abs(lam) <= 1e-8 * std::max(1.0, smax)) fail(ErrorKind::DegenerateSaddle, "vanishing second derivative");
    const double sgn = lam > 0.0 ? 1.0 : -1.0;
    est += std::sqrt(kTwoPi / std::abs(lam)) / A(phi0) * std::polar(1.0, S(phi0) + sgn * 0.25 * kPi);
    ++found;
  }
  if (found == 0) fail(ErrorKind::SaddleNotFound, "no stationary point of the boundary phase");
  return -kI * nu * est;
}

namespace {

// int_0^P r^2 e^{i a r} dr and int_0^P r e^{i a r} dr.
Complex radial3(double a, double P) {
  const double x = a * P;
  if (std::abs(x) < 1e-2) {
    const double P3 = P * P * P;
    return P3 * Complex(1.0 / 3.0 - x * x / 10.0, x / 4.0 - x * x * x / 36.0);
  }
  const Complex e = std::polar(1.0, x);
  return e * Complex(2.0 * P / (a * a), -P * P / a + 2.0 / (a * a * a)) - Complex(0.0, 2.0 / (a * a * a));
}

Complex radial2(double a, double P) {
  const double x = a * P;
  if (std::abs(x) < 1e-2) {
    const double P2 = P * P;
    return P2 * Complex(0.5 - x * x / 8.0, x / 3.0 - x * x * x / 30.0);
  }
  const Complex e = std::polar(1.0, x);
  return e * Complex(1.0 / (a * a), -P / a) - 1.0 / (a * a);
}

Complex planar_factor(const ConvexRegion& region, const Vector3& origin, const Vector3& k, int order) {
  const Vector3 kp(k.x(), k.y(), 0.0);
  if (region.shape.is_unit()) {
    const double x = kp.norm() * region.size_R;
    const double R2 = region.size_R * region.size_R;
    const double base = x < 1e-8 ? kPi * R2 : kTwoPi * R2 * std::cyl_bessel_j(1.0, x) / x;
    return base * std::polar(1.0, kp.dot(origin));
  }
  const int n = std::max(order, 2 * static_cast<int>(std::ceil(kp.norm() * region.bounding_radius())) + 64);
  const double h = kTwoPi / n;
  KahanSum<Complex> s(Complex{});
  for (int j = 0; j < n; ++j) {
    const Vector3 u(std::cos(h * j), std::sin(h * j), 0.0);
    s.add(h * radial2(kp.dot(u), region.boundary_distance(origin, u)));
  }
  return s.value() * std::polar(1.0, kp.dot(origin));
}

}  // namespace

Complex continuum_form_factor(const ConvexRegion& region, const Vector3& k, int order) {
  region.validate();
  switch (region.kind) {
    case RegionKind::Ball3D: {
      const Complex shift = std::polar(1.0, k.dot(region.center));
      if (region.shape.is_unit()) {
        const double R = region.size_R;
        const double x = k.norm() * R;
        if (x < 1e-3) return shift * (4.0 / 3.0 * kPi * R * R * R * (1.0 - x * x / 10.0));
        return shift * (4.0 * kPi * (std::sin(x) - x * std::cos(x)) / std::pow(k.norm(), 3));
      }
      const int n = std::max(order, static_cast<int>(std::ceil(k.norm() * region.bounding_radius())) + 32);
      const GaussRule& rule = gauss_legendre(n);
      const double h = kPi / n;
      KahanSum<Complex> s(Complex{});
      for (int i = 0; i < n; ++i) {
        const double ct = rule.nodes[i];
        const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
        for (int j = 0; j < 2 * n; ++j) {
          const Vector3 u(st * std::cos(h * j), st * std::sin(h * j), ct);
          s.add(rule.weights[i] * h * radial3(k.dot(u), region.boundary_distance(region.center, u)));
        }
      }
      return shift * s.value();
    }
    case RegionKind::Disk2D:
      return planar_factor(region, region.center, k, order);
    case RegionKind::CylinderOnPlane: {
      const double l = region.thickness_l;
      const double kz = k.z();
      const Complex zf = std::abs(kz * l) < 1e-8 ? Complex(l, 0.5 * kz * l * l)
                                                  : (std::polar(1.0, kz * l) - 1.0) / Complex(0.0, kz);
      return planar_factor(region, region.center, k, order) * zf;
    }
  }
  return {};
}

}  // namespace cascade
