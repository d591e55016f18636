#include "cascade/discrete.hpp"

#include <doctest.h>

#include <json.hpp>

using namespace cascade;

namespace {

MoleculeCloud random_cloud(std::size_t n, double R, std::uint64_t seed) {
  return sample_points(ConvexRegion::ball(R), n, seed, SamplingMode::UniformRandom);
}

BeamSet beams_with(const Vector3& kb, double w) {
  BeamSet b;
  b.k_b = kb;
  b.omega_b = w;
  return b;
}

double rel(const Tensor3& a, const Tensor3& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("form factor") {
  const auto cloud = random_cloud(50, 2.0, 1);
  const Complex f0 = form_factor(cloud, Vector3::Zero());
  CHECK(f0.real() == doctest::Approx(50.0));
  CHECK(f0.imag() == 0.0);
  CHECK(std::abs(form_factor(MoleculeCloud({Vector3::Zero()}), Vector3(1, 2, 3)) - 1.0) < 1e-15);
  const double d = 0.7, k = 2.3;
  const MoleculeCloud pair({Vector3(0, 0, d / 2), Vector3(0, 0, -d / 2)});
  CHECK(std::abs(form_factor(pair, Vector3(0, 0, k)) - 2 * std::cos(k * d / 2)) < 1e-14);
  for (int i = 0; i < 10; ++i) {
    const Vector3 kv(0.3 * i, -0.1 * i, 0.05 * i * i);
    const Complex f = form_factor(cloud, kv);
    CHECK(std::abs(f) <= 50.0 + 1e-12);
    CHECK(std::abs(form_factor(cloud, -kv) - std::conj(f)) < 1e-12);
  }
}

TEST_CASE("integrated Green's function for a single source") {
  const double w = 1.0;
  const Vector3 rb = Vector3::Zero();
  for (double r : {3.0, 7.5, 40.0}) {
    const Vector3 ra(0, 0, r);
    const MoleculeCloud one({rb});
    // k_b perpendicular to the separation: phase is (w/c) r.
    const auto perp = integrated_green_discrete(one, ra, beams_with(Vector3(0.6, 0, 0), w), KernelKind::Scalar);
    CHECK(std::abs(wrap_angle(std::arg(perp.scalar) - w * r)) < 1e-12);
    // Colinear, matched: the geometric phase vanishes.
    const auto col = integrated_green_discrete(one, ra, beams_with(Vector3(0, 0, w), w), KernelKind::Scalar);
    CHECK(std::abs(std::arg(col.scalar)) < 1e-12);
    CHECK(col.n_b == 1);
  }
}

TEST_CASE("self exclusion") {
  const auto cloud = random_cloud(20, 1.0, 2);
  const auto b = beams_with(Vector3(0.2, 0, 0), 1.0);
  const auto ig = integrated_green_discrete(cloud, cloud[3], b, KernelKind::Vector);
  CHECK(ig.n_b == 19);
  CHECK(ig.tensor.allFinite());
  SumOptions strict;
  strict.exclude_self = false;
  try {
    integrated_green_discrete(cloud, cloud[3], b, KernelKind::Vector, {}, strict);
    FAIL("expected SingularSeparation");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SingularSeparation);
  }
}

TEST_CASE("additivity over partitions and summation modes") {
  const auto cloud = random_cloud(600, 3.0, 3);
  std::vector<Vector3> left(cloud.positions().begin(), cloud.positions().begin() + 250);
  std::vector<Vector3> right(cloud.positions().begin() + 250, cloud.positions().end());
  const auto b = beams_with(Vector3(0.3, 0.1, 0), 1.2);
  const Vector3 ra(0.1, 0.2, 10.0);
  for (auto kind : {KernelKind::Scalar, KernelKind::Vector}) {
    const auto all = integrated_green_discrete(cloud, ra, b, kind);
    const auto l = integrated_green_discrete(MoleculeCloud(left), ra, b, kind);
    const auto r = integrated_green_discrete(MoleculeCloud(right), ra, b, kind);
    CHECK(rel(l.tensor + r.tensor, all.tensor) < 1e-13);

    SumOptions rep1{true, 1, true}, rep4{true, 4, true}, tree4{false, 4, true};
    const auto a1 = integrated_green_discrete(cloud, ra, b, kind, {}, rep1);
    const auto a4 = integrated_green_discrete(cloud, ra, b, kind, {}, rep4);
    CHECK(a1.tensor == a4.tensor);
    CHECK(rel(integrated_green_discrete(cloud, ra, b, kind, {}, tree4).tensor, a1.tensor) < 1e-12);
  }
}

TEST_CASE("k-space double sum") {
  const MoleculeCloud pair({Vector3(0.1, 0.2, 0.3), Vector3(-0.5, 0.4, 1.0)});
  const Vector3 k(0.3, -0.2, 0.5), kp(-0.1, 0.7, 0.2);
  const double w = 1.4;
  for (auto kind : {KernelKind::Scalar, KernelKind::Vector}) {
    auto G = [&](const Vector3& a, const Vector3& b) -> Tensor3 {
      return kind == KernelKind::Vector ? vector_green(a, b, w)
                                        : Tensor3(scalar_green(a, b, w) * Tensor3::Identity());
    };
    const Tensor3 hand = std::polar(1.0, -(k.dot(pair[0]) + kp.dot(pair[1]))) * G(pair[0], pair[1]) +
                         std::polar(1.0, -(k.dot(pair[1]) + kp.dot(pair[0]))) * G(pair[1], pair[0]);
    CHECK(rel(kspace_green_discrete(pair, k, kp, w, kind), hand) < 1e-14);
  }
  const auto cloud = random_cloud(80, 2.0, 4);
  Tensor3 plain = Tensor3::Zero();
  for (std::size_t a = 0; a < cloud.size(); ++a)
    for (std::size_t b = 0; b < cloud.size(); ++b)
      if (a != b) plain += vector_green(cloud[a], cloud[b], w);
  CHECK(rel(kspace_green_discrete(cloud, Vector3::Zero(), Vector3::Zero(), w, KernelKind::Vector), plain) < 1e-12);

  // Factorisation through the integrated Green's function with k_b = -k'.
  const auto Is = integrated_green_at_molecules(cloud, beams_with(-kp, w), KernelKind::Vector);
  Tensor3 fact = Tensor3::Zero();
  for (std::size_t a = 0; a < cloud.size(); ++a) fact += std::polar(1.0, -(k + kp).dot(cloud[a])) * Is[a].tensor;
  CHECK(rel(kspace_green_discrete(cloud, k, kp, w, KernelKind::Vector), fact) < 1e-12);
  CHECK_THROWS_AS(kspace_green_discrete(MoleculeCloud({Vector3::Zero()}), k, kp, w, KernelKind::Scalar), Error);
}

TEST_CASE("two-molecule tensor") {
  const double w = 1.0;
  for (double r : {0.5, 3.0, 25.0}) {
    const Vector3 kb(0.2, -0.4, 0.7);
    const Tensor3 g = two_molecule_green(r, kb, w);
    const Tensor3 ref = std::polar(1.0, kb.dot(Vector3::Zero() - Vector3(0, 0, r))) *
                        vector_green<double>(Vector3(0, 0, r), Vector3::Zero(), w);
    CHECK(rel(g, ref) < 1e-12);
    // zz: no (w/c)^2 r^2 term.
    const Complex zz_expected = 2.0 / (kTwoPi * r * r * r) * std::polar(1.0, w * r - kb.z() * r) * Complex(1.0, -w * r);
    CHECK(std::abs(g(2, 2) - zz_expected) < 1e-12 * std::abs(zz_expected));
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) CHECK(g(i, j) == Complex{});
    // Perpendicular k_b leaves the overall factor e^{i w r / c}.
    const Tensor3 perp = two_molecule_green(r, Vector3(0.9, 0, 0), w);
    const Tensor3 stat = two_molecule_green(r, Vector3(0, 0, w), w);
    CHECK(rel(perp, std::polar(1.0, w * r) * stat) < 1e-12);
  }
  CHECK_THROWS_AS(two_molecule_green(0.0, Vector3::Zero(), 1.0), Error);
}

TEST_CASE("three-body factor") {
  const MoleculeCloud tri({Vector3(0, 0, 0), Vector3(1.1, 0.2, -0.3), Vector3(-0.4, 0.9, 0.5)});
  BeamSet bb, bc;
  bb.k_a = Vector3(0.1, 0, 0);
  bb.k_s = Vector3(0, 0.2, 0.1);
  bb.k_b = Vector3(0.3, 0.1, 0);
  bb.omega_b = 1.1;
  bc.k_b = Vector3(0, -0.2, 0.4);
  bc.omega_b = 0.7;
  const Vector3 dk = bb.k_a + bb.k_b + bc.k_b - bb.k_s;
  for (auto kind : {KernelKind::Scalar, KernelKind::Vector}) {
    auto G = [&](const Vector3& a, const Vector3& b, double w) -> Tensor3 {
      return kind == KernelKind::Vector ? vector_green(a, b, w)
                                        : Tensor3(scalar_green(a, b, w) * Tensor3::Identity());
    };
    Eigen::Matrix<Complex, 9, 9> hand = Eigen::Matrix<Complex, 9, 9>::Zero();
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          if (b == a || c == a) continue;
          const Tensor3 gb = std::polar(1.0, bb.k_b.dot(tri[b] - tri[a])) * G(tri[a], tri[b], bb.omega_b);
          const Tensor3 gc = std::polar(1.0, bc.k_b.dot(tri[c] - tri[a])) * G(tri[a], tri[c], bc.omega_b);
          const Complex ph = std::polar(1.0, dk.dot(tri[a]));
          for (int v = 0; v < 3; ++v)
            for (int vp = 0; vp < 3; ++vp)
              for (int m = 0; m < 3; ++m)
                for (int mp = 0; mp < 3; ++mp) hand(3 * v + vp, 3 * m + mp) += ph * gb(v, vp) * gc(m, mp);
        }
    const auto T = three_body_factor(tri, bb, bc, kind);
    CHECK((T - hand).norm() <= 1e-13 * hand.norm());

    Tensor3 A, B;
    A << 1, 2, 0, 0, 1, 0, Complex(0, 1), 0, 3;
    B << 0, 1, 0, 1, 0, 0, 0, 0, Complex(2, -1);
    Complex full{};
    for (int i = 0; i < 9; ++i)
      for (int j = 0; j < 9; ++j) full += A(i / 3, i % 3) * T(i, j) * B(j / 3, j % 3);
    CHECK(std::abs(three_body_contracted(tri, bb, bc, A, B, kind) - full) < 1e-12 * std::abs(full));
  }
  // Zero frequency and wavevectors: product of static sums.
  BeamSet z;
  z.omega_b = 0.0;
  const auto T0 = three_body_factor(tri, z, z, KernelKind::Scalar);
  Complex expect{};
  for (int a = 0; a < 3; ++a) {
    double s = 0.0;
    for (int b = 0; b < 3; ++b)
      if (b != a) s += 1.0 / (tri[a] - tri[b]).norm();
    expect += s * s;
  }
  CHECK(std::abs(T0(0, 0) - expect) < 1e-12 * std::abs(expect));
  CHECK_THROWS_AS(three_body_factor(MoleculeCloud({Vector3::Zero(), Vector3::UnitX()}), z, z, KernelKind::Scalar),
                  Error);
}

TEST_CASE("JSON export") {
  const auto ig = integrated_green_discrete(random_cloud(10, 1.0, 5), Vector3(0, 0, 3), beams_with(Vector3::Zero(), 1.0),
                                            KernelKind::Vector);
  const auto j = nlohmann::json::parse(to_json(ig, "abc"));
  CHECK(j["operation"] == "integrated_green_discrete");
  CHECK(j["inputs_digest"] == "abc");
  CHECK(j["tensor"].size() == 3);
  CHECK(j["tensor"][1][1][0].get<double>() == doctest::Approx(ig.tensor(1, 1).real()));
  CHECK(j["meta"]["N_b"] == 10);
  CHECK(j["meta"]["normalization"] == "OverTwoPi");
}
