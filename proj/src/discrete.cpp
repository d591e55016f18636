#include "cascade/discrete.hpp"

#include "reduce.hpp"

#include <json.hpp>

namespace cascade {

namespace {

Tensor3 kernel_tensor(const Vector3& r_a, const Vector3& r_b, double omega, KernelKind kind,
                      const KernelConfig& cfg) {
  if (kind == KernelKind::Vector) return vector_green(r_a, r_b, omega, cfg);
  return scalar_green(r_a, r_b, omega, cfg) * Tensor3::Identity();
}

Normalization effective_norm(KernelKind kind, const KernelConfig& cfg) {
  return cfg.norm_or(kind == KernelKind::Scalar ? Normalization::Bare : Normalization::OverTwoPi);
}

// Sum over b != skip of e^{i k_b.(r_b - r_a)} G(r_a, r_b).
IntegratedGreen integrate_excluding(const MoleculeCloud& cloud, const Vector3& r_a, std::size_t skip,
                                    const BeamSet& beams, KernelKind kind, const KernelConfig& cfg,
                                    const SumOptions& opts) {
  const std::size_t n = cloud.size();
  IntegratedGreen out;
  out.r_a = r_a;
  out.kind = kind;
  out.normalization = effective_norm(kind, cfg);
  out.n_b = skip < n ? n - 1 : n;
  if (out.n_b == 0) fail(ErrorKind::EmptySample, "no source molecules besides r_a");
  const double w = beams.omega_b;
  if (kind == KernelKind::Scalar) {
    auto term = [&](std::size_t b) -> Complex {
      if (b == skip) return {};
      const Vector3& r_b = cloud[b];
      return std::polar(1.0, beams.k_b.dot(r_b - r_a)) * scalar_green(r_a, r_b, w, cfg);
    };
    out.scalar = detail::reduce<Complex>(n, term, Complex{}, opts);
    out.tensor = out.scalar * Tensor3::Identity();
  } else {
    auto term = [&](std::size_t b) -> Tensor3 {
      if (b == skip) return Tensor3::Zero();
      const Vector3& r_b = cloud[b];
      return std::polar(1.0, beams.k_b.dot(r_b - r_a)) * vector_green(r_a, r_b, w, cfg);
    };
    out.tensor = detail::reduce<Tensor3>(n, term, Tensor3::Zero().eval(), opts);
  }
  return out;
}

}  // namespace

Complex form_factor(const MoleculeCloud& cloud, const Vector3& k, const SumOptions& opts) {
  auto term = [&](std::size_t a) { return std::polar(1.0, k.dot(cloud[a])); };
  return detail::reduce<Complex>(cloud.size(), term, Complex{}, opts);
}

IntegratedGreen integrated_green_discrete(const MoleculeCloud& cloud, const Vector3& r_a, const BeamSet& beams,
                                          KernelKind kind, const KernelConfig& cfg, const SumOptions& opts) {
  beams.validate();
  cfg.validate();
  std::size_t skip = cloud.size();
  for (std::size_t b = 0; b < cloud.size(); ++b) {
    if (cloud[b] == r_a) {
      if (!opts.exclude_self) fail(ErrorKind::SingularSeparation, "r_a coincides with a cloud point");
      skip = b;
      break;
    }
  }
  return integrate_excluding(cloud, r_a, skip, beams, kind, cfg, opts);
}

std::vector<IntegratedGreen> integrated_green_at_molecules(const MoleculeCloud& cloud, const BeamSet& beams,
                                                           KernelKind kind, const KernelConfig& cfg,
                                                           const SumOptions& opts) {
  beams.validate();
  cfg.validate();
  std::vector<IntegratedGreen> out;
  out.reserve(cloud.size());
  SumOptions inner = opts;
  inner.threads = 1;
  if (opts.threads <= 1 || opts.reproducible) {
    for (std::size_t a = 0; a < cloud.size(); ++a) {
      out.push_back(integrate_excluding(cloud, cloud[a], a, beams, kind, cfg, inner));
    }
    return out;
  }
  out.resize(cloud.size());
  std::vector<std::future<void>> jobs;
  const std::size_t parts = static_cast<std::size_t>(opts.threads);
  for (std::size_t p = 0; p < parts; ++p) {
    jobs.push_back(std::async(std::launch::async, [&, p] {
      for (std::size_t a = p; a < cloud.size(); a += parts) {
        out[a] = integrate_excluding(cloud, cloud[a], a, beams, kind, cfg, inner);
      }
    }));
  }
  for (auto& j : jobs) j.get();
  return out;
}

Tensor3 kspace_green_discrete(const MoleculeCloud& cloud, const Vector3& k, const Vector3& k_prime, double omega,
                              KernelKind kind, const KernelConfig& cfg, const SumOptions& opts) {
  const std::size_t n = cloud.size();
  if (n < 2) fail(ErrorKind::InsufficientBodies, "kspace_green_discrete needs >= 2 molecules");
  cfg.validate();
  auto row = [&](std::size_t a) -> Tensor3 {
    auto inner = [&](std::size_t b) -> Tensor3 {
      if (b == a) return Tensor3::Zero();
      return std::polar(1.0, -(k.dot(cloud[a]) + k_prime.dot(cloud[b]))) *
             kernel_tensor(cloud[a], cloud[b], omega, kind, cfg);
    };
    SumOptions seq = opts;
    seq.threads = 1;
    return detail::reduce<Tensor3>(n, inner, Tensor3::Zero().eval(), seq);
  };
  return detail::reduce<Tensor3>(n, row, Tensor3::Zero().eval(), opts);
}

Tensor3 two_molecule_green(double separation, const Vector3& k_b, double omega_b, const KernelConfig& cfg) {
  if (!(separation > 0.0)) fail(ErrorKind::SingularSeparation, "separation must be positive");
  const double r = separation;
  const double q = omega_b / cfg.c;
  const double nf = norm_factor<double>(cfg.norm_or(Normalization::OverTwoPi));
  const Complex pref = -nf * std::polar(1.0, q * r - k_b.z() * r) / (r * r * r);
  Tensor3 g = Tensor3::Zero();
  for (int v = 0; v < 3; ++v) {
    const bool z = v == 2;
    const Complex near_mid = (z ? -2.0 : 1.0) * Complex(1.0, -q * r);
    const double far = z ? 0.0 : q * q * r * r;
    g(v, v) = pref * (near_mid - far);
  }
  return g;
}

namespace {

template <typename Visit>
void visit_three_body(const MoleculeCloud& cloud, const BeamSet& beams_b, const BeamSet& beams_c, KernelKind kind,
                      const KernelConfig& cfg, const SumOptions& opts, Visit&& visit) {
  if (cloud.size() < 3) fail(ErrorKind::InsufficientBodies, "three_body_factor needs >= 3 molecules");
  const auto Ib = integrated_green_at_molecules(cloud, beams_b, kind, cfg, opts);
  const auto Ic = integrated_green_at_molecules(cloud, beams_c, kind, cfg, opts);
  const Vector3 dk = beams_b.k_a + beams_b.k_b + beams_c.k_b - beams_b.k_s;
  for (std::size_t a = 0; a < cloud.size(); ++a) {
    visit(std::polar(1.0, dk.dot(cloud[a])), Ib[a].tensor, Ic[a].tensor);
  }
}

}  // namespace

Eigen::Matrix<Complex, 9, 9> three_body_factor(const MoleculeCloud& cloud, const BeamSet& beams_b,
                                               const BeamSet& beams_c, KernelKind kind, const KernelConfig& cfg,
                                               const SumOptions& opts) {
  using M9 = Eigen::Matrix<Complex, 9, 9>;
  KahanSum<M9> acc(M9::Zero());
  visit_three_body(cloud, beams_b, beams_c, kind, cfg, opts, [&](Complex ph, const Tensor3& ib, const Tensor3& ic) {
    const Eigen::Map<const Eigen::Matrix<Complex, 9, 1>> vb(ib.data());
    const Eigen::Map<const Eigen::Matrix<Complex, 9, 1>> vc(ic.data());
    M9 t = ph * (vb * vc.transpose());
    acc.add(t);
  });
  // Column-major maps give index 3 nu' + nu; transpose the 3x3 blocks to 3 nu + nu'.
  M9 out;
  for (int v = 0; v < 3; ++v)
    for (int vp = 0; vp < 3; ++vp)
      for (int m = 0; m < 3; ++m)
        for (int mp = 0; mp < 3; ++mp) out(3 * v + vp, 3 * m + mp) = acc.value()(3 * vp + v, 3 * mp + m);
  return out;
}

Complex three_body_contracted(const MoleculeCloud& cloud, const BeamSet& beams_b, const BeamSet& beams_c,
                              const Tensor3& A, const Tensor3& B, KernelKind kind, const KernelConfig& cfg,
                              const SumOptions& opts) {
  KahanSum<Complex> acc(Complex{});
  visit_three_body(cloud, beams_b, beams_c, kind, cfg, opts, [&](Complex ph, const Tensor3& ib, const Tensor3& ic) {
    acc.add(ph * A.cwiseProduct(ib).sum() * B.cwiseProduct(ic).sum());
  });
  return acc.value();
}

std::string to_json(const IntegratedGreen& ig, const std::string& inputs_digest) {
  nlohmann::json j;
  j["operation"] = "integrated_green_discrete";
  j["inputs_digest"] = inputs_digest;
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 3; ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (int c = 0; c < 3; ++c) row.push_back({ig.tensor(r, c).real(), ig.tensor(r, c).imag()});
    rows.push_back(row);
  }
  j["tensor"] = rows;
  j["meta"] = {{"kernel", to_string(ig.kind)},
               {"normalization", to_string(ig.normalization)},
               {"N_b", ig.n_b},
               {"r_a", {ig.r_a.x(), ig.r_a.y(), ig.r_a.z()}}};
  return j.dump();
}

}  // namespace cascade
