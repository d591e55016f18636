#include "cascade/continuum.hpp"
#include "cascade/quadrature.hpp"

#include <doctest.h>

#include <vector>

using namespace cascade;

namespace {

constexpr double kLambda = kTwoPi;  // omega_b = c = 1
const Complex kI(0.0, 1.0);

BeamSet beams_with(const Vector3& kb) {
  BeamSet b;
  b.k_b = kb;
  return b;
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no exception");
  return ErrorKind::IoError;
}

KernelConfig over_two_pi() {
  KernelConfig c;
  c.normalization = Normalization::OverTwoPi;
  return c;
}

}  // namespace

TEST_CASE("closed forms") {
  CHECK(analytic_3d(0.0, 1.0).real() == doctest::Approx(-4 * kPi));
  CHECK(analytic_3d(0.5, 1.0).real() == doctest::Approx(-16.755160819));
  CHECK(analytic_3d(0.5, 1.0).imag() == 0.0);
  CHECK(std::arg(analytic_3d(0.3, 1.0)) == doctest::Approx(kPi));
  CHECK(kind_of([] { analytic_3d(1.0, 1.0); }) == ErrorKind::ResonanceSingularity);
  CHECK(std::abs(analytic_2d(0.0, 2.0) - Complex(0, -0.5)) < 1e-15);
  CHECK(std::abs(analytic_2d(0.8, 1.0) - Complex(0, -1.0 / 0.6)) < 1e-14);
  CHECK(std::arg(analytic_2d(0.4, 1.0)) == doctest::Approx(-kPi / 2));
  CHECK(kind_of([] { analytic_2d(1.0, 1.0); }) == ErrorKind::ResonanceSingularity);
  const Complex m = analytic_cylinder_matched(3.0, 0.0, 1.0);
  CHECK(std::abs(m - kTwoPi * 3.0 * kI) < 1e-14);
  CHECK(wrap_angle(std::arg(analytic_cylinder_matched(1.0, kPi, 1.0)) - 1.5 * kPi) == doctest::Approx(0.0));
  CHECK(std::abs(analytic_cylinder_matched(2.0, 0.3, 1.0)) == doctest::Approx(2 * std::abs(analytic_cylinder_matched(1.0, 0.3, 1.0))));
}

TEST_CASE("sinc") {
  CHECK(sinc(0.0) == 1.0);
  CHECK(std::abs(sinc(kPi)) < 1e-16);
  CHECK(sinc(1e-5) == doctest::Approx(std::sin(1e-5) / 1e-5).epsilon(1e-15));
  for (int i = 1; i < 2000; ++i) {
    const double x = -50.0 + 0.05 * i;
    if (x != 0.0) CHECK(std::abs(sinc(x)) <= 1.0 / std::abs(x) + 1e-15);
  }
}

TEST_CASE("ball: bulk term and exact total at the centre") {
  const auto k0 = integrate_case_3d(ConvexRegion::ball(5.0), Vector3::Zero(), beams_with(Vector3::Zero()));
  CHECK(k0.value.real() == doctest::Approx(-4 * kPi));
  for (double R : {3.0, 5.0, 11.0}) {
    const double q = 1.0, k = 0.5;
    const auto r = integrate_case_3d(ConvexRegion::ball(R), Vector3::Zero(), beams_with(Vector3(0.3, 0, 0.4)));
    CHECK(std::abs(r.value - analytic_3d(k, q)) < 1e-10);
    const Complex exact = -(kTwoPi / k) * ((std::polar(1.0, (q + k) * R) - 1.0) / (q + k) -
                                            (std::polar(1.0, (q - k) * R) - 1.0) / (q - k));
    CHECK(std::abs(r.value + r.boundary_term - exact) < 1e-9);
    CHECK(r.est_error >= 0.0);
  }
}

TEST_CASE("ball: off-centre point against brute-force quadrature") {
  const auto ball = ConvexRegion::ball(3.0);
  const Vector3 ra(0.7, -0.4, 0.5);
  const Vector3 kb(0.2, 0.1, -0.3);
  const auto r = integrate_case_3d(ball, ra, beams_with(kb));
  // Brute force: Gauss-Legendre in the radial distance along each direction.
  Complex brute{};
  const GaussRule& rule = gauss_legendre(96);
  const int nphi = 192;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double ct = rule.nodes[i], st = std::sqrt(1 - ct * ct);
    for (int j = 0; j < nphi; ++j) {
      const double phi = kTwoPi * j / nphi;
      const Vector3 u(st * std::cos(phi), st * std::sin(phi), ct);
      const double P = ball.boundary_distance(ra, u);
      const double A = 1.0 + kb.dot(u);
      brute += rule.weights[i] * (kTwoPi / nphi) *
               integrate_gl([&](double rho) { return rho * std::polar(1.0, rho * A); }, 0.0, P, 40);
    }
  }
  CHECK(std::abs(r.value + r.boundary_term - brute) < 1e-8 * std::abs(brute));
}

TEST_CASE("ball: preconditions") {
  const auto ball = ConvexRegion::ball(4.0);
  CHECK(kind_of([&] { integrate_case_3d(ball, Vector3::Zero(), beams_with(Vector3(1.2, 0, 0))); }) ==
        ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { integrate_case_3d(ball, Vector3(5, 0, 0), beams_with(Vector3::Zero())); }) ==
        ErrorKind::OutsideRegion);
  CHECK(kind_of([&] { integrate_case_3d(ConvexRegion::disk(4.0), Vector3::Zero(), beams_with(Vector3::Zero())); }) ==
        ErrorKind::KindMismatch);
  const auto near = integrate_case_3d(ball, Vector3(3.5, 0, 0), beams_with(Vector3::Zero()));
  CHECK(near.warnings.size() == 1);
}

TEST_CASE("disk: I0 closed form and brute-force total") {
  const auto disk = ConvexRegion::disk(5.0);
  const auto r = integrate_case_2d(disk, Vector3::Zero(), beams_with(Vector3(0.5, 0, 0.9)));
  CHECK(std::abs(r.value - kI * kTwoPi / std::sqrt(0.75)) < 1e-10);
  const auto k0 = integrate_case_2d(disk, Vector3::Zero(), beams_with(Vector3::Zero()), {}, over_two_pi());
  CHECK(std::abs(k0.value - kI) < 1e-12);
  // Under the 1/(2 pi) normalization I0 is the negative of the closed form.
  const auto o = integrate_case_2d(disk, Vector3::Zero(), beams_with(Vector3(0.5, 0, 0)), {}, over_two_pi());
  CHECK(std::abs(o.value + analytic_2d(0.5, 1.0)) < 1e-12);

  const Vector3 ra(1.0, -0.5, 0.0);
  const Vector3 kb(0.3, 0.4, 0.0);
  const auto off = integrate_case_2d(disk, ra, beams_with(kb));
  Complex brute{};
  const int nphi = 400;
  for (int j = 0; j < nphi; ++j) {
    const double phi = kTwoPi * j / nphi;
    const Vector3 u(std::cos(phi), std::sin(phi), 0.0);
    const double P = disk.boundary_distance(ra, u);
    const double A = 1.0 + kb.dot(u);
    brute += (kTwoPi / nphi) * integrate_gl([&](double rho) { return std::polar(1.0, rho * A); }, 0.0, P, 40);
  }
  CHECK(std::abs(off.value + off.boundary_term - brute) < 1e-9 * std::abs(brute));
  CHECK(kind_of([&] { integrate_case_2d(disk, Vector3::Zero(), beams_with(Vector3(1.0, 0.2, 0))); }) ==
        ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { integrate_case_2d(disk, Vector3(0, 0, 1), beams_with(Vector3::Zero())); }) ==
        ErrorKind::OutsideRegion);
}

TEST_CASE("disk: boundary term falls off as (R w / c)^(-1/2)") {
  std::vector<double> x, y;
  for (int i = 0; i <= 40; ++i) {
    const double R = 10.0 * kLambda * std::pow(10.0, i / 40.0);
    const auto r = integrate_case_2d(ConvexRegion::disk(R), Vector3::Zero(), beams_with(Vector3(0.5, 0, 0)));
    x.push_back(std::log(R));
    y.push_back(std::log(std::abs(r.boundary_term) / std::abs(r.value)));
  }
  CHECK(fit_slope(x, y) == doctest::Approx(-0.5).epsilon(0.3));
}

TEST_CASE("refinement: doubling the angular order stays within est_error") {
  const auto ell = ConvexRegion::ball(4.0, Vector3::Zero(), ShapeFunction::ellipsoid(1.0, 1.3, 0.8));
  QuadratureSpec q;
  q.max_refinements = 2;
  const auto a = integrate_case_3d(ell, Vector3(0.2, 0, 0), beams_with(Vector3(0, 0.4, 0)), q);
  q.angular_order *= 2;
  const auto b = integrate_case_3d(ell, Vector3(0.2, 0, 0), beams_with(Vector3(0, 0.4, 0)), q);
  CHECK(std::abs(a.value - b.value) <= std::max(a.est_error, 1e-10 * std::abs(a.value)));
  CHECK(std::abs(a.boundary_term - b.boundary_term) <= std::max(a.est_error, 1e-8 * std::abs(a.boundary_term)));
}

TEST_CASE("cylinder: sinc form, numeric z oracle and matched limit") {
  const double l = 40.3 * kLambda;
  const auto cyl = ConvexRegion::cylinder(8.0 * kLambda, l);
  const double k = 1.0 - 0.01 / l;
  const Vector3 ra(0, 0, 0.5 * l);
  const auto closed = integrate_cylinder(cyl, ra, beams_with(Vector3(0, 0, k)));
  QuadratureSpec qz;
  qz.numeric_z = true;
  qz.compute_boundary = false;
  const auto numeric = integrate_cylinder(cyl, ra, beams_with(Vector3(0, 0, k)), qz);
  CHECK(std::abs(closed.value - numeric.value) < 1e-8 * std::abs(closed.value));
  for (int i = 0; i < 3; ++i) CHECK(std::abs(closed.terms[i] - numeric.terms[i]) < 1e-8 * std::abs(closed.value));

  // Magnitude of the matched limit and the smallness of the image term.
  CHECK(std::abs(closed.value) == doctest::Approx(kTwoPi * 0.5 * l).epsilon(0.05));
  CHECK(std::abs(closed.terms[2]) / std::abs(closed.value) < 1e-2);
  // The sum is phase-referenced to z_a; the closed form carries an extra e^{i k z_a}.
  const Complex shifted = closed.value * std::polar(1.0, k * ra.z());
  CHECK(std::abs(shifted - analytic_cylinder_matched(ra.z(), k, 1.0)) < 0.05 * std::abs(shifted));
  CHECK(std::isfinite(closed.boundary_term.real()));
  CHECK(std::abs(closed.boundary_term) < 0.2 * std::abs(closed.value));

  // Linear growth in z_a.
  std::vector<double> z, m;
  for (int i = 0; i <= 12; ++i) {
    const double za = l * (0.2 + 0.05 * i);
    QuadratureSpec nb;
    nb.compute_boundary = false;
    z.push_back(za);
    m.push_back(std::abs(integrate_cylinder(cyl, Vector3(0, 0, za), beams_with(Vector3(0, 0, k)), nb).value));
  }
  CHECK(fit_slope(z, m) == doctest::Approx(kTwoPi).epsilon(0.05));

  CHECK(kind_of([&] { integrate_cylinder(cyl, ra, beams_with(Vector3(0.1, 0, k))); }) ==
        ErrorKind::PreconditionViolated);
  CHECK(kind_of([&] { integrate_cylinder(cyl, Vector3(0, 0, l + 1), beams_with(Vector3(0, 0, k))); }) ==
        ErrorKind::OutsideRegion);
}

TEST_CASE("saddle estimate of the disk boundary term") {
  CHECK(kind_of([] {
          boundary_saddle_estimate(ConvexRegion::disk(50.0), Vector3::Zero(), beams_with(Vector3::Zero()));
        }) == ErrorKind::DegenerateSaddle);
  for (double aq : {60.0, 150.0, 400.0}) {
    const auto disk = ConvexRegion::disk(aq);
    const auto b = beams_with(Vector3(0.5, 0, 0));
    const Complex est = boundary_saddle_estimate(disk, Vector3::Zero(), b);
    const Complex direct = integrate_case_2d(disk, Vector3::Zero(), b).boundary_term;
    const double ratio = std::abs(est) / std::abs(direct);
    CHECK(ratio > 0.5);
    CHECK(ratio < 2.0);
    // With the pi/4 phase included the complex values agree too.
    CHECK(std::abs(est - direct) < 0.1 * std::abs(direct));
  }
  // A non-circular boundary still has isolated stationary points.
  const auto ell = ConvexRegion::disk(100.0, Vector3::Zero(), ShapeFunction::ellipse(1.0, 1.4));
  const Complex e = boundary_saddle_estimate(ell, Vector3::Zero(), beams_with(Vector3(0.3, 0.2, 0)));
  const Complex d = integrate_case_2d(ell, Vector3::Zero(), beams_with(Vector3(0.3, 0.2, 0))).boundary_term;
  CHECK(std::abs(e) / std::abs(d) == doctest::Approx(1.0).epsilon(0.5));
}

TEST_CASE("continuum form factor") {
  const auto ball = ConvexRegion::ball(2.0);
  CHECK(continuum_form_factor(ball, Vector3::Zero()).real() == doctest::Approx(4.0 / 3.0 * kPi * 8.0));
  // Force the numeric path with a constant table.
  Eigen::MatrixXd ones = Eigen::MatrixXd::Ones(9, 16);
  const auto tball = ConvexRegion::ball(2.0, Vector3(0.5, 0, 0), ShapeFunction::table(ones));
  const Vector3 k(0.3, 0.6, -0.2);
  const Complex analytic = continuum_form_factor(ConvexRegion::ball(2.0, Vector3(0.5, 0, 0)), k);
  CHECK(std::abs(continuum_form_factor(tball, k) - analytic) < 1e-9 * std::abs(analytic));
  const auto disk = ConvexRegion::disk(3.0);
  const auto tdisk = ConvexRegion::disk(3.0, Vector3::Zero(), ShapeFunction::table(std::vector<double>(8, 1.0)));
  const Complex fd = continuum_form_factor(disk, Vector3(0.7, 0.2, 5.0));
  CHECK(std::abs(continuum_form_factor(tdisk, Vector3(0.7, 0.2, 5.0)) - fd) < 1e-9 * std::abs(fd));
  const auto cyl = ConvexRegion::cylinder(1.0, 4.0);
  CHECK(std::abs(continuum_form_factor(cyl, Vector3::Zero()) - kPi * 4.0) < 1e-12);
  const auto ell = ConvexRegion::ball(1.0, Vector3::Zero(), ShapeFunction::ellipsoid(1.0, 2.0, 3.0));
  CHECK(continuum_form_factor(ell, Vector3::Zero()).real() == doctest::Approx(8.0 * kPi).epsilon(1e-6));
}
