// Scalar Helmholtz and vector dipole photon Green's functions, the isotropic
// k-space limit, the reflecting-plane image kernel and a solid-angle oracle.
#ifndef CASCADE_KERNELS_HPP
#define CASCADE_KERNELS_HPP

#include "cascade/common.hpp"
#include "cascade/quadrature.hpp"

#include <optional>
#include <string>

namespace cascade {

/// Overall kernel prefactor: 1/(2 pi r) style or bare 1/r.
enum class Normalization { OverTwoPi, Bare };

inline const char* to_string(Normalization n) noexcept {
  return n == Normalization::OverTwoPi ? "OverTwoPi" : "Bare";
}

struct KernelConfig {
  double c = 1.0;
  /// Regulariser in units of omega^2; unset means 1e-6 * omega^2.
  std::optional<double> eta;
  /// Unset means the kernel's own default (Bare for scalar, OverTwoPi for vector).
  std::optional<Normalization> normalization;

  double eta_at(double omega) const { return eta ? *eta : 1e-6 * omega * omega; }
  Normalization norm_or(Normalization fallback) const { return normalization.value_or(fallback); }

  void validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) fail(ErrorKind::PreconditionViolated, "kernel c must be positive");
    if (eta && !(*eta >= 0.0)) fail(ErrorKind::PreconditionViolated, "kernel eta must be >= 0");
  }
};

template <typename Scalar>
Scalar norm_factor(Normalization n) {
  return n == Normalization::OverTwoPi ? Scalar(1) / (Scalar(2) * Scalar(kPi)) : Scalar(1);
}

namespace detail {

template <typename Scalar>
Scalar separation(const Vec3<Scalar>& ra, const Vec3<Scalar>& rb, Vec3<Scalar>* unit = nullptr) {
  const Vec3<Scalar> d = ra - rb;
  const Scalar r = d.norm();
  if (!(r > Scalar(0))) fail(ErrorKind::SingularSeparation, "coincident points");
  if (unit) *unit = d / r;
  return r;
}

}  // namespace detail

/// e^{i (w/c) r} / r, optionally over 2 pi.
template <typename Scalar>
std::complex<Scalar> scalar_green(const Vec3<Scalar>& r_a, const Vec3<Scalar>& r_b, Scalar omega,
                                  const KernelConfig& cfg = {}) {
  const Scalar r = detail::separation(r_a, r_b);
  const Scalar q = omega / Scalar(cfg.c);
  return std::polar(norm_factor<Scalar>(cfg.norm_or(Normalization::Bare)) / r, q * r);
}

template <typename Scalar>
struct GreenTerms {
  ComplexTensor3<Scalar> near;  // r^-3
  ComplexTensor3<Scalar> mid;   // r^-2
  ComplexTensor3<Scalar> far;   // r^-1, transverse
};

template <typename Scalar>
GreenTerms<Scalar> vector_green_terms(const Vec3<Scalar>& r_a, const Vec3<Scalar>& r_b, Scalar omega,
                                      const KernelConfig& cfg = {}) {
  using C = std::complex<Scalar>;
  using M = Eigen::Matrix<Scalar, 3, 3>;
  Vec3<Scalar> n;
  const Scalar r = detail::separation(r_a, r_b, &n);
  const Scalar q = omega / Scalar(cfg.c);
  const C pref = -std::polar(norm_factor<Scalar>(cfg.norm_or(Normalization::OverTwoPi)) / (r * r * r), q * r);
  const M nn = n * n.transpose();
  const M longi = M::Identity() - Scalar(3) * nn;
  const M trans = M::Identity() - nn;
  GreenTerms<Scalar> t;
  t.near = pref * longi.template cast<C>();
  t.mid = (pref * C(0, -q * r)) * longi.template cast<C>();
  t.far = (-pref * (q * q * r * r)) * trans.template cast<C>();
  return t;
}

/// Dipole tensor -e^{iqr}/(2 pi r^3) [(1 - 3 nn)(1 - iqr) - (1 - nn) q^2 r^2].
template <typename Scalar>
ComplexTensor3<Scalar> vector_green(const Vec3<Scalar>& r_a, const Vec3<Scalar>& r_b, Scalar omega,
                                    const KernelConfig& cfg = {}) {
  const auto t = vector_green_terms(r_a, r_b, omega, cfg);
  return t.near + t.mid + t.far;
}

/// Isotropic coefficient of delta: (-4/3) w^2 / (w^2 - k^2 c^2 + i eta).
template <typename Scalar>
std::complex<Scalar> kspace_green_continuum(Scalar k, Scalar omega, const KernelConfig& cfg = {}) {
  if (k < Scalar(0)) fail(ErrorKind::PreconditionViolated, "k must be >= 0");
  const Scalar c = Scalar(cfg.c);
  const Scalar eta = Scalar(cfg.eta_at(double(omega)));
  const Scalar den = omega * omega - k * k * c * c;
  if (eta == Scalar(0) && den == Scalar(0)) fail(ErrorKind::ResonanceSingularity, "omega = k c with eta = 0");
  return Scalar(-4) / Scalar(3) * omega * omega / std::complex<Scalar>(den, eta);
}

/// Scalar kernel above a reflecting plane z = 0: direct minus image.
template <typename Scalar>
std::complex<Scalar> reflecting_green(const Vec3<Scalar>& r_a, const Vec3<Scalar>& r_b, Scalar omega,
                                      const KernelConfig& cfg = {}) {
  if (r_a.z() < Scalar(0) || r_b.z() < Scalar(0)) fail(ErrorKind::InvalidHalfSpace, "point below the plane");
  Vec3<Scalar> image = r_b;
  image.z() = -image.z();
  const auto direct = scalar_green(r_a, r_b, omega, cfg);
  if (r_b.z() == Scalar(0)) return std::complex<Scalar>(0);
  return direct - scalar_green(r_a, image, omega, cfg);
}

/// Integral over unit directions of (1 - kk) e^{i k_v k.r}, by product
/// Gauss-Legendre (cos theta) x trapezoid (phi), doubled until successive
/// levels agree to 1e-8 relative.
inline Tensor3 solid_angle_oracle(const Vector3& r, double k_v) {
  if (!(k_v > 0.0)) fail(ErrorKind::PreconditionViolated, "k_v must be positive");
  if (!(r.norm() > 0.0)) fail(ErrorKind::SingularSeparation, "r must be nonzero");
  auto level = [&](int n_theta, int n_phi) {
    const GaussRule& rule = gauss_legendre(n_theta);
    Tensor3 acc = Tensor3::Zero();
    const double h = kTwoPi / n_phi;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double ct = rule.nodes[i];
      const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int j = 0; j < n_phi; ++j) {
        const double phi = h * j;
        const Vector3 k(st * std::cos(phi), st * std::sin(phi), ct);
        const Complex w = rule.weights[i] * h * std::polar(1.0, k_v * k.dot(r));
        acc += w * (Eigen::Matrix3d::Identity() - k * k.transpose()).cast<Complex>();
      }
    }
    return acc;
  };
  int n_theta = 8;
  int n_phi = 16;
  Tensor3 prev = level(n_theta, n_phi);
  for (int it = 0; it < 10; ++it) {
    n_theta *= 2;
    n_phi *= 2;
    Tensor3 next = level(n_theta, n_phi);
    if ((next - prev).norm() <= 1e-8 * next.norm()) return next;
    prev = std::move(next);
  }
  return prev;
}

/// 4 pi (-lap delta + grad grad) sin(k r)/(k^3 r) by 5-point central differences, h = 1e-3 |r|.
inline Eigen::Matrix3d dipole_operator_fd(const Vector3& r, double k_v) {
  if (!(r.norm() > 0.0)) fail(ErrorKind::SingularSeparation, "r must be nonzero");
  const double h = 1e-3 * r.norm();
  auto f = [k_v](const Vector3& p) {
    const double x = p.norm();
    return std::sin(k_v * x) / (k_v * k_v * k_v * x);
  };
  const Eigen::Matrix3d E = Eigen::Matrix3d::Identity();
  auto d1 = [&](auto&& g, const Vector3& p, int i) {
    return (g(p - 2 * h * E.col(i)) - 8 * g(p - h * E.col(i)) + 8 * g(p + h * E.col(i)) - g(p + 2 * h * E.col(i))) /
           (12 * h);
  };
  Eigen::Matrix3d H;
  for (int i = 0; i < 3; ++i) {
    const Vector3 e = E.col(i);
    H(i, i) = (-f(r + 2 * h * e) + 16 * f(r + h * e) - 30 * f(r) + 16 * f(r - h * e) - f(r - 2 * h * e)) / (12 * h * h);
    for (int j = 0; j < i; ++j) {
      auto dj = [&](const Vector3& p) { return d1(f, p, j); };
      H(i, j) = H(j, i) = d1(dj, r, i);
    }
  }
  return 4.0 * kPi * (H - H.trace() * E);
}

}  // namespace cascade

#endif  // CASCADE_KERNELS_HPP
