#include "cascade/signal.hpp"

#include "cascade/quadrature.hpp"

#include <limits>
#include <ostream>

namespace cascade {

Complex ResponseModel::lineshape(double omega) const {
  if (!std::isfinite(omega)) fail(ErrorKind::ResponseDomainError, "non-finite frequency");
  if (kind == Kind::OffResonant) return {1.0, 0.0};
  if (!(omega0 > 0.0) || !(gamma >= 0.0)) fail(ErrorKind::ResponseDomainError, "Lorentzian needs omega0 > 0, gamma >= 0");
  const Complex den(omega0 * omega0 - omega * omega, -gamma * omega);
  if (den == Complex{}) fail(ErrorKind::ResponseDomainError, "undamped Lorentzian at resonance");
  return omega0 * omega0 / den;
}

CVector3 ResponseModel::P(const Vector3& k, double omega) const {
  if (!k.allFinite()) fail(ErrorKind::ResponseDomainError, "non-finite wavevector");
  return chi * lineshape(omega) * polarization;
}

Tensor3 ResponseModel::P_tilde(const Vector3& k, double omega, double omega_prime) const {
  if (!k.allFinite() || !std::isfinite(omega_prime)) fail(ErrorKind::ResponseDomainError, "non-finite argument");
  return chi_tilde * lineshape(omega) * Tensor3::Identity();
}

const char* to_string(Engine e) noexcept {
  switch (e) {
    case Engine::DiscreteSum: return "DiscreteSum";
    case Engine::Continuum3D: return "Continuum3D";
    case Engine::Continuum2D: return "Continuum2D";
    case Engine::ContinuumCylinder: return "ContinuumCylinder";
  }
  return "Unknown";
}

CVector3 direct_polarization(const ResponseModel& resp, const Sample& sample, const BeamSet& beams) {
  const Vector3 dk = beams.k_a - beams.k_s;
  Complex f;
  if (const auto* cloud = std::get_if<MoleculeCloud>(&sample)) {
    f = form_factor(*cloud, dk);
  } else {
    const auto& rs = std::get<RegionSample>(sample);
    f = rs.concentration * continuum_form_factor(rs.region, dk);
  }
  return resp.P(beams.k_a, beams.omega_s) * f;
}

namespace {

const RegionSample& region_for(const Sample& sample, RegionKind kind, Engine engine) {
  const auto* rs = std::get_if<RegionSample>(&sample);
  if (!rs || rs->region.kind != kind) {
    fail(ErrorKind::EngineMismatch, std::string(to_string(engine)) + " needs a " + to_string(kind) + " region");
  }
  return *rs;
}

double vector_conversion(double omega, const KernelConfig& cfg) {
  const double q = omega / cfg.c;
  return 2.0 / 3.0 * q * q * norm_factor<double>(cfg.norm_or(Normalization::OverTwoPi)) /
         norm_factor<double>(cfg.norm_or(Normalization::Bare));
}

}  // namespace

Tensor3 cascade_propagator(const Sample& sample, const BeamSet& beams, Engine engine, const KernelConfig& cfg,
                           const CascadeOptions& opts) {
  beams.validate();
  const Vector3 dk = beams.cascade_dk();
  if (engine == Engine::DiscreteSum) {
    const auto* cloud = std::get_if<MoleculeCloud>(&sample);
    if (!cloud) fail(ErrorKind::EngineMismatch, "DiscreteSum needs a molecule cloud");
    const auto I = integrated_green_at_molecules(*cloud, beams, opts.kernel, cfg, opts.sums);
    KahanSum<Tensor3> acc(Tensor3::Zero());
    for (std::size_t a = 0; a < cloud->size(); ++a) acc.add(std::polar(1.0, dk.dot((*cloud)[a])) * I[a].tensor);
    return acc.value();
  }

  QuadratureSpec quad = opts.quadrature;
  quad.compute_boundary = false;
  Complex total;
  double n = 0.0;
  switch (engine) {
    case Engine::Continuum3D:
    case Engine::Continuum2D: {
      const RegionKind rk = engine == Engine::Continuum3D ? RegionKind::Ball3D : RegionKind::Disk2D;
      const auto& rs = region_for(sample, rk, engine);
      n = rs.concentration;
      const ContinuumResult I = engine == Engine::Continuum3D
                                    ? integrate_case_3d(rs.region, rs.region.center, beams, quad, cfg)
                                    : integrate_case_2d(rs.region, rs.region.center, beams, quad, cfg);
      total = n * n * I.value * continuum_form_factor(rs.region, dk);
      break;
    }
    case Engine::ContinuumCylinder: {
      const auto& rs = region_for(sample, RegionKind::CylinderOnPlane, engine);
      n = rs.concentration;
      const ConvexRegion& reg = rs.region;
      const ConvexRegion section = ConvexRegion::disk(reg.size_R, reg.center, reg.shape);
      const Complex lateral = continuum_form_factor(section, Vector3(dk.x(), dk.y(), 0.0));
      auto along = [&](double za) {
        const Vector3 r_a(reg.center.x(), reg.center.y(), za);
        return std::polar(1.0, dk.z() * za) * integrate_cylinder(reg, r_a, beams, quad, cfg).value;
      };
      total = n * n * lateral * integrate_gl(along, 0.0, reg.thickness_l, opts.z_order);
      break;
    }
    case Engine::DiscreteSum:
      break;
  }
  if (opts.kernel == KernelKind::Vector) total *= vector_conversion(beams.omega_b, cfg);
  return total * Tensor3::Identity();
}

CVector3 cascade_polarization(const ResponseModel& resp, const Sample& sample, const BeamSet& beams, Engine engine,
                              const KernelConfig& cfg, const CascadeOptions& opts) {
  const Tensor3 G = cascade_propagator(sample, beams, engine, cfg, opts);
  return resp.P_tilde(beams.k_a, beams.omega_s, -beams.omega_b) * G * resp.P(beams.k_b, beams.omega_b);
}

double heterodyne_signal(const CVector3& E_s, const CVector3& P_total) {
  return E_s.dot(P_total).imag();
}

PhaseReport phase_analysis(const CVector3& direct, const CVector3& cascade) {
  if (!(direct.norm() > 0.0)) fail(ErrorKind::DegenerateReference, "direct polarization is zero");
  PhaseReport rep;
  rep.direct = direct;
  rep.cascade = cascade;
  double in = 0.0, out = 0.0, best = -1.0;
  for (int j = 0; j < 3; ++j) {
    const double m = std::abs(direct[j]);
    if (m == 0.0) continue;
    const Complex u = cascade[j] * std::conj(direct[j]) / m;
    in += u.real() * u.real();
    out += u.imag() * u.imag();
    if (std::abs(u) > best) {
      best = std::abs(u);
      rep.rel_phase = std::abs(u) > 0.0 ? wrap_angle(std::arg(u)) : 0.0;
    }
  }
  const double tot = in + out;
  rep.in_phase_frac = tot > 0.0 ? in / tot : 1.0;
  rep.out_phase_frac = tot > 0.0 ? out / tot : 0.0;
  return rep;
}

MacroscopicCascade macroscopic_cascade(const ResponseModel& resp, const BeamSet& beams, double eta) {
  if (!(eta > 0.0)) fail(ErrorKind::PreconditionViolated, "eta must be positive");
  beams.validate();
  const double k = beams.k_b.norm();
  const double kc2 = k * k * beams.c * beams.c;
  const double x = beams.omega_b * beams.omega_b - kc2;
  const double den = x * x + eta * eta;

  MacroscopicCascade out;
  out.eta = eta;
  out.pv_weight = kc2 * x / den;
  out.delta_weight = Complex(0.0, -kc2 * eta / den);

  const CVector3 P = resp.P(beams.k_b, beams.omega_b);
  CVector3 Pt = P;
  if (k > 0.0) {
    const Vector3 kh = beams.k_b / k;
    const CVector3 khc = kh.cast<Complex>();
    Pt = P - khc * (khc.transpose() * P)(0);
  }
  const CVector3 v = resp.P_tilde(beams.k_a, beams.omega_s, -beams.omega_b) * Pt;
  out.pv_vector = out.pv_weight * v;
  out.delta_vector = out.delta_weight * v;
  const double pn = resp.polarization.norm();
  const Complex s = pn > 0.0 ? resp.polarization.dot(v) / pn : Complex{};
  out.pv_part = out.pv_weight * s;
  out.delta_part = out.delta_weight * s;
  return out;
}

void write_phase_csv(std::ostream& out, const std::vector<double>& sweep, const std::vector<PhaseReport>& rows) {
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "sweep_var,re_direct,im_direct,re_cascade,im_cascade,rel_phase,in_frac,out_frac\n";
  for (std::size_t i = 0; i < rows.size() && i < sweep.size(); ++i) {
    const PhaseReport& r = rows[i];
    const CVector3& d = r.direct;
    const CVector3& c = r.cascade;
    // Projected on the dominant direct component.
    int j = 0;
    d.cwiseAbs().maxCoeff(&j);
    out << sweep[i] << ',' << d[j].real() << ',' << d[j].imag() << ',' << c[j].real() << ',' << c[j].imag() << ','
        << r.rel_phase << ',' << r.in_phase_frac << ',' << r.out_phase_frac << '\n';
  }
}

}  // namespace cascade
