#include "cascade/scenario.hpp"

#include <json.hpp>

#include <chrono>
#include <fstream>
#include <future>
#include <iomanip>
#include <limits>
#include <sstream>

namespace cascade {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
  fail(ErrorKind::ConfigError, path + ": " + what);
}

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

const json* find(const json& j, const std::string& key) {
  if (!j.is_object()) return nullptr;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return nullptr;
  return &*it;
}

const json& require(const json& j, const std::string& key, const std::string& path) {
  const json* v = find(j, key);
  if (!v) config_error(join(path, key), "missing field");
  return *v;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) config_error(path, "expected a number");
  return j.get<double>();
}

double number_or(const json& j, const std::string& key, const std::string& path, double fallback) {
  const json* v = find(j, key);
  return v ? number(*v, join(path, key)) : fallback;
}

long long integer(const json& j, const std::string& path) {
  const double d = number(j, path);
  if (d != std::floor(d) || std::abs(d) > 9e15) config_error(path, "expected an integer");
  return static_cast<long long>(d);
}

bool boolean_or(const json& j, const std::string& key, const std::string& path, bool fallback) {
  const json* v = find(j, key);
  if (!v) return fallback;
  if (!v->is_boolean()) config_error(join(path, key), "expected true or false");
  return v->get<bool>();
}

std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) config_error(path, "expected a string");
  return j.get<std::string>();
}

Vector3 vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) config_error(path, "expected an array of 3 numbers");
  Vector3 v;
  for (int i = 0; i < 3; ++i) v[i] = number(j[i], path + "[" + std::to_string(i) + "]");
  return v;
}

ShapeFunction parse_xi(const json* j, const std::string& path) {
  if (!j) return ShapeFunction::unit();
  const std::string type = text(require(*j, "type", path), join(path, "type"));
  const std::string dpath = join(path, "data");
  const json* data = find(*j, "data");
  try {
    if (type == "table") {
      if (!data || !data->is_array() || data->empty()) config_error(dpath, "expected a non-empty array");
      if ((*data)[0].is_array()) {
        const auto rows = static_cast<Eigen::Index>(data->size());
        const auto cols = static_cast<Eigen::Index>((*data)[0].size());
        Eigen::MatrixXd grid(rows, cols);
        for (Eigen::Index r = 0; r < rows; ++r) {
          const json& row = (*data)[r];
          if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) config_error(dpath, "ragged table");
          for (Eigen::Index c = 0; c < cols; ++c) grid(r, c) = number(row[c], dpath);
        }
        return ShapeFunction::table(grid);
      }
      std::vector<double> values;
      for (const auto& v : *data) values.push_back(number(v, dpath));
      return ShapeFunction::table(std::move(values));
    }
    if (type != "analytic") config_error(join(path, "type"), "expected \"analytic\" or \"table\"");
    if (!data) return ShapeFunction::unit();
    const std::string name = data->is_string() ? data->get<std::string>() : text(require(*data, "name", dpath), dpath + ".name");
    if (name == "unit") return ShapeFunction::unit();
    if (name == "ellipse") {
      return ShapeFunction::ellipse(number(require(*data, "a", dpath), dpath + ".a"),
                                    number(require(*data, "b", dpath), dpath + ".b"));
    }
    if (name == "ellipsoid") {
      return ShapeFunction::ellipsoid(number(require(*data, "a", dpath), dpath + ".a"),
                                      number(require(*data, "b", dpath), dpath + ".b"),
                                      number(require(*data, "c", dpath), dpath + ".c"));
    }
    if (name == "star") {
      return ShapeFunction::star(number(require(*data, "amplitude", dpath), dpath + ".amplitude"),
                                 static_cast<int>(integer(require(*data, "lobes", dpath), dpath + ".lobes")));
    }
    config_error(dpath + ".name", "unknown shape '" + name + "'");
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(path, e.what());
  }
}

ConvexRegion parse_region(const json& j, const std::string& path) {
  const std::string kind = text(require(j, "kind", path), join(path, "kind"));
  const Vector3 center = find(j, "center") ? vec3(j["center"], join(path, "center")) : Vector3::Zero();
  const double R = number(require(j, "R", path), join(path, "R"));
  const ShapeFunction xi = parse_xi(find(j, "xi"), join(path, "xi"));
  try {
    if (kind == "Ball3D" || kind == "ball") return ConvexRegion::ball(R, center, xi);
    if (kind == "Disk2D" || kind == "disk") return ConvexRegion::disk(R, center, xi);
    if (kind == "CylinderOnPlane" || kind == "cylinder") {
      return ConvexRegion::cylinder(R, number(require(j, "l", path), join(path, "l")), center, xi);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::ConfigError) throw;
    config_error(path, e.what());
  }
  config_error(join(path, "kind"), "expected Ball3D, Disk2D or CylinderOnPlane");
}

struct Parsed {
  std::string name;
  Engine engine = Engine::Continuum3D;
  KernelKind kernel_kind = KernelKind::Scalar;
  std::optional<ConvexRegion> region;
  std::optional<MoleculeCloud> cloud;
  std::optional<double> concentration;
  std::size_t molecules = 0;
  SamplingMode sampling = SamplingMode::UniformRandom;
  BeamSet beams;
  KernelConfig kernel;
  QuadratureSpec quad;
  ResponseModel resp;
  std::optional<Vector3> r_a;
  bool signal = true;
  bool exclude_self = true;
  std::uint64_t seed = 0;
};

Parsed parse(const json& doc, const fs::path& base) {
  if (!doc.is_object()) config_error("<root>", "expected an object");
  Parsed p;
  p.name = find(doc, "name") ? text(doc["name"], "name") : "scenario";
  if (const json* s = find(doc, "seed")) p.seed = static_cast<std::uint64_t>(integer(*s, "seed"));

  const json& sample = require(doc, "sample", "");
  if (const json* r = find(sample, "region")) p.region = parse_region(*r, "sample.region");
  if (const json* c = find(sample, "cloud")) {
    fs::path cp = text(*c, "sample.cloud");
    if (cp.is_relative()) cp = base / cp;
    p.cloud = read_cloud_csv(cp.string());
  }
  if (const json* n = find(sample, "concentration")) {
    p.concentration = number(*n, "sample.concentration");
    if (!(*p.concentration > 0.0)) config_error("sample.concentration", "must be positive");
  }
  if (const json* m = find(sample, "molecules")) {
    const long long n = integer(*m, "sample.molecules");
    if (n < 1) config_error("sample.molecules", "must be >= 1");
    p.molecules = static_cast<std::size_t>(n);
  }
  if (const json* s = find(sample, "sampling")) {
    const std::string mode = text(*s, "sample.sampling");
    if (mode == "uniform") p.sampling = SamplingMode::UniformRandom;
    else if (mode == "lattice") p.sampling = SamplingMode::Lattice;
    else config_error("sample.sampling", "expected \"uniform\" or \"lattice\"");
  }
  if (!p.region && !p.cloud) config_error("sample", "needs a region or a cloud");

  const json& beams = require(doc, "beams", "");
  p.beams.k_a = find(beams, "k_a") ? vec3(beams["k_a"], "beams.k_a") : Vector3::Zero();
  p.beams.k_b = vec3(require(beams, "k_b", "beams"), "beams.k_b");
  p.beams.k_s = find(beams, "k_s") ? vec3(beams["k_s"], "beams.k_s") : Vector3::Zero();
  p.beams.omega_b = number(require(beams, "omega_b", "beams"), "beams.omega_b");
  p.beams.omega_s = number_or(beams, "omega_s", "beams", p.beams.omega_b);
  p.beams.c = number_or(beams, "c", "beams", 1.0);
  if (!(p.beams.c > 0.0)) config_error("beams.c", "must be positive");

  p.kernel.c = p.beams.c;
  if (const json* k = find(doc, "kernel")) {
    p.kernel.c = number_or(*k, "c", "kernel", p.beams.c);
    if (!(p.kernel.c > 0.0)) config_error("kernel.c", "must be positive");
    if (const json* e = find(*k, "eta")) {
      p.kernel.eta = number(*e, "kernel.eta");
      if (*p.kernel.eta < 0.0) config_error("kernel.eta", "must be >= 0");
    }
    if (const json* nm = find(*k, "normalization")) {
      const std::string s = text(*nm, "kernel.normalization");
      if (s == "bare" || s == "Bare") p.kernel.normalization = Normalization::Bare;
      else if (s == "over_two_pi" || s == "OverTwoPi") p.kernel.normalization = Normalization::OverTwoPi;
      else config_error("kernel.normalization", "expected \"bare\" or \"over_two_pi\"");
    }
    if (const json* kk = find(*k, "kind")) {
      const std::string s = text(*kk, "kernel.kind");
      if (s == "scalar") p.kernel_kind = KernelKind::Scalar;
      else if (s == "vector") p.kernel_kind = KernelKind::Vector;
      else config_error("kernel.kind", "expected \"scalar\" or \"vector\"");
    }
  }

  if (const json* q = find(doc, "quadrature")) {
    const std::string qp = "quadrature";
    if (const json* v = find(*q, "angular_order")) p.quad.angular_order = static_cast<int>(integer(*v, qp + ".angular_order"));
    if (const json* v = find(*q, "radial_order")) p.quad.radial_order = static_cast<int>(integer(*v, qp + ".radial_order"));
    p.quad.refinement_tol = number_or(*q, "refinement_tol", qp, p.quad.refinement_tol);
    if (const json* v = find(*q, "max_refinements")) {
      p.quad.max_refinements = static_cast<int>(integer(*v, qp + ".max_refinements"));
    }
    p.quad.compute_boundary = boolean_or(*q, "compute_boundary", qp, true);
    p.quad.numeric_z = boolean_or(*q, "numeric_z", qp, false);
    p.quad.validate();
  }

  if (const json* r = find(doc, "response")) {
    const std::string model = find(*r, "model") ? text((*r)["model"], "response.model") : "off_resonant";
    if (model == "off_resonant") p.resp.kind = ResponseModel::Kind::OffResonant;
    else if (model == "lorentzian") p.resp.kind = ResponseModel::Kind::Lorentzian;
    else config_error("response.model", "expected \"off_resonant\" or \"lorentzian\"");
    p.resp.chi = number_or(*r, "chi", "response", 1.0);
    p.resp.chi_tilde = number_or(*r, "chi_tilde", "response", 1.0);
    p.resp.omega0 = number_or(*r, "omega0", "response", 0.0);
    p.resp.gamma = number_or(*r, "gamma", "response", 0.0);
    if (const json* pol = find(*r, "polarization")) {
      p.resp.polarization = vec3(*pol, "response.polarization").cast<Complex>();
    }
  }

  if (const json* e = find(doc, "engine")) {
    const std::string s = text(*e, "engine");
    if (s == "discrete") p.engine = Engine::DiscreteSum;
    else if (s == "continuum3d") p.engine = Engine::Continuum3D;
    else if (s == "continuum2d") p.engine = Engine::Continuum2D;
    else if (s == "cylinder") p.engine = Engine::ContinuumCylinder;
    else config_error("engine", "expected discrete, continuum3d, continuum2d or cylinder");
  } else if (p.cloud || p.molecules > 0) {
    p.engine = Engine::DiscreteSum;
  } else {
    switch (p.region->kind) {
      case RegionKind::Ball3D: p.engine = Engine::Continuum3D; break;
      case RegionKind::Disk2D: p.engine = Engine::Continuum2D; break;
      case RegionKind::CylinderOnPlane: p.engine = Engine::ContinuumCylinder; break;
    }
  }
  if (p.engine == Engine::DiscreteSum && !p.cloud && (!p.region || p.molecules == 0)) {
    config_error("sample", "discrete engine needs a cloud or a region with molecules");
  }
  if (p.engine != Engine::DiscreteSum && !p.region) config_error("sample.region", "continuum engines need a region");

  if (const json* r = find(doc, "r_a")) p.r_a = vec3(*r, "r_a");
  p.signal = boolean_or(doc, "signal", "", true);
  p.exclude_self = boolean_or(doc, "exclude_self", "", true);
  return p;
}

json::json_pointer sweep_pointer(const std::string& variable) {
  std::string ptr;
  std::stringstream ss(variable);
  std::string part;
  while (std::getline(ss, part, '.')) ptr += "/" + part;
  return json::json_pointer(ptr);
}

struct Sweep {
  std::string variable;
  std::vector<double> values;
};

Sweep parse_sweep(const json& doc) {
  const json& s = require(doc, "sweep", "");
  Sweep sw;
  sw.variable = text(require(s, "variable", "sweep"), "sweep.variable");
  const json& vals = require(s, "values", "sweep");
  if (!vals.is_array()) config_error("sweep.values", "expected an array");
  if (vals.empty()) config_error("sweep.values", "must not be empty");
  for (std::size_t i = 0; i < vals.size(); ++i) {
    sw.values.push_back(number(vals[i], "sweep.values[" + std::to_string(i) + "]"));
  }
  json::json_pointer ptr;
  try {
    ptr = sweep_pointer(sw.variable);
  } catch (const json::exception&) {
    config_error("sweep.variable", "malformed path '" + sw.variable + "'");
  }
  if (sw.variable.empty() || !doc.contains(ptr) || !doc.at(ptr).is_number()) {
    config_error("sweep.variable", "'" + sw.variable + "' does not name a numeric scenario field");
  }
  return sw;
}

json load_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::ConfigError, std::string("<root>: ") + e.what());
  }
}

json apply_overrides(json doc, const RunOptions& opts) {
  if (opts.seed) doc["seed"] = *opts.seed;
  return doc;
}

Vector3 default_r_a(const Parsed& p) {
  if (p.r_a) return *p.r_a;
  const ConvexRegion& reg = *p.region;
  if (reg.kind == RegionKind::CylinderOnPlane) return {reg.center.x(), reg.center.y(), 0.5 * reg.thickness_l};
  return reg.center;
}

PointRecord evaluate_point(const json& doc, const fs::path& base, double sweep_value, const RunOptions& opts,
                           int inner_threads) {
  PointRecord rec;
  rec.sweep_value = sweep_value;
  try {
    const Parsed p = parse(doc, base);
    SumOptions sums;
    sums.reproducible = opts.reproducible;
    sums.threads = inner_threads;
    sums.exclude_self = p.exclude_self;
    const BeamSet& b = p.beams;
    const double q = b.omega_b / p.kernel.c;

    std::optional<Sample> sample;
    switch (p.engine) {
      case Engine::Continuum3D:
      case Engine::Continuum2D:
      case Engine::ContinuumCylinder: {
        const Vector3 r_a = default_r_a(p);
        ContinuumResult res;
        if (p.engine == Engine::Continuum3D) {
          res = integrate_case_3d(*p.region, r_a, b, p.quad, p.kernel);
          if (b.k_b.norm() < q) {
            rec.reference = analytic_3d(b.k_b.norm(), b.omega_b, p.kernel.c);
            rec.has_reference = true;
          }
        } else if (p.engine == Engine::Continuum2D) {
          res = integrate_case_2d(*p.region, r_a, b, p.quad, p.kernel);
          rec.reference = analytic_2d(std::hypot(b.k_b.x(), b.k_b.y()), b.omega_b, p.kernel.c);
          rec.has_reference = true;
        } else {
          res = integrate_cylinder(*p.region, r_a, b, p.quad, p.kernel);
          rec.reference = analytic_cylinder_matched(r_a.z(), b.k_b.z(), b.omega_b, p.kernel.c);
          rec.has_reference = true;
        }
        rec.I = res.value;
        rec.boundary_term = res.boundary_term;
        rec.est_error = res.est_error;
        rec.warnings = res.warnings;
        sample = RegionSample{*p.region, p.concentration.value_or(1.0)};
        break;
      }
      case Engine::DiscreteSum: {
        MoleculeCloud cloud = p.cloud ? *p.cloud : sample_points(*p.region, p.molecules, p.seed, p.sampling);
        double n = 0.0;
        if (p.concentration) n = *p.concentration;
        else if (cloud.concentration()) n = *cloud.concentration();
        else if (p.region) n = static_cast<double>(cloud.size()) / p.region->measure();
        else config_error("sample.concentration", "needed for a cloud without a region");
        const Vector3 r_a = p.r_a ? *p.r_a : (p.region ? default_r_a(p) : Vector3::Zero());
        const IntegratedGreen ig = integrated_green_discrete(cloud, r_a, b, p.kernel_kind, p.kernel, sums);
        rec.I = (p.kernel_kind == KernelKind::Scalar ? ig.scalar : ig.tensor.trace() / 3.0) / n;
        if (p.region && p.region->kind == RegionKind::Disk2D && std::hypot(b.k_b.x(), b.k_b.y()) < q) {
          rec.reference = analytic_2d(std::hypot(b.k_b.x(), b.k_b.y()), b.omega_b, p.kernel.c);
          rec.has_reference = true;
        } else if (p.region && p.region->kind == RegionKind::Ball3D && b.k_b.norm() < q) {
          rec.reference = analytic_3d(b.k_b.norm(), b.omega_b, p.kernel.c);
          rec.has_reference = true;
        }
        cloud.set_concentration(n);
        sample = std::move(cloud);
        break;
      }
    }
    if (p.signal) {
      CascadeOptions co;
      co.kernel = p.kernel_kind;
      co.quadrature = p.quad;
      co.sums = sums;
      const CVector3 direct = direct_polarization(p.resp, *sample, b);
      const CVector3 cascade = cascade_polarization(p.resp, *sample, b, p.engine, p.kernel, co);
      rec.phase = phase_analysis(direct, cascade);
      rec.has_phase = true;
    }
    rec.ok = true;
  } catch (const Error& e) {
    rec.ok = false;
    rec.error_kind = to_string(e.kind());
    rec.message = e.what();
  }
  return rec;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json vector_json(const CVector3& v) {
  json a = json::array();
  for (int i = 0; i < 3; ++i) a.push_back(complex_json(v[i]));
  return a;
}

json record_json(const PointRecord& r) {
  json j;
  j["sweep_value"] = r.sweep_value;
  j["status"] = r.ok ? "ok" : "error";
  if (!r.ok) {
    j["error_kind"] = r.error_kind;
    j["message"] = r.message;
    return j;
  }
  j["I"] = complex_json(r.I);
  j["boundary_term"] = complex_json(r.boundary_term);
  j["est_error"] = r.est_error;
  if (r.has_reference) j["reference"] = complex_json(r.reference);
  if (r.has_phase) {
    j["phase"] = {{"direct", vector_json(r.phase.direct)},
                  {"cascade", vector_json(r.phase.cascade)},
                  {"rel_phase", r.phase.rel_phase},
                  {"in_phase_frac", r.phase.in_phase_frac},
                  {"out_phase_frac", r.phase.out_phase_frac}};
  }
  j["warnings"] = r.warnings;
  return j;
}

std::string versions_string() {
  std::ostringstream s;
  s << EIGEN_WORLD_VERSION << '.' << EIGEN_MAJOR_VERSION << '.' << EIGEN_MINOR_VERSION;
  return s.str();
}

double column_of(const PointRecord& r, const std::string& column, bool from_reference) {
  const Complex z = from_reference ? r.reference : r.I;
  if (column == "re_I") return z.real();
  if (column == "im_I") return z.imag();
  if (column == "abs_I") return std::abs(z);
  if (column == "arg_I") return std::arg(z);
  if (column == "im_over_re") return std::abs(z.imag()) / std::abs(z.real());
  if (from_reference) config_error("expect.reference", "only I columns can be compared with a reference");
  if (column == "abs_boundary_over_abs_I") return std::abs(r.boundary_term) / std::abs(r.I);
  if (column == "est_error") return r.est_error;
  if (column == "rel_phase" || column == "in_frac" || column == "out_frac") {
    if (!r.has_phase) config_error("expect.column", "'" + column + "' needs \"signal\": true");
    if (column == "rel_phase") return r.phase.rel_phase;
    return column == "in_frac" ? r.phase.in_phase_frac : r.phase.out_phase_frac;
  }
  config_error("expect.column", "unknown column '" + column + "'");
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(10) << v;
  return s.str();
}

}  // namespace

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << h;
  return s.str();
}

std::string scenario_digest(const std::string& json_text, const RunOptions& opts) {
  return fnv1a_hex(apply_overrides(load_json(json_text), opts).dump());
}

void write_plot_csv(std::ostream& out, const RunResult& run) {
  out.precision(std::numeric_limits<double>::max_digits10);
  out << "sweep_value,re_I,im_I,abs_I,arg_I,re_direct,im_direct,re_cascade,im_cascade,rel_phase,est_error\n";
  for (const auto& r : run.points) {
    out << r.sweep_value;
    if (!r.ok) {
      for (int i = 0; i < 10; ++i) out << ",nan";
      out << '\n';
      continue;
    }
    out << ',' << r.I.real() << ',' << r.I.imag() << ',' << std::abs(r.I) << ',' << std::arg(r.I);
    if (r.has_phase) {
      int j = 0;
      r.phase.direct.cwiseAbs().maxCoeff(&j);
      const Complex d = r.phase.direct[j];
      const Complex c = r.phase.cascade[j];
      out << ',' << d.real() << ',' << d.imag() << ',' << c.real() << ',' << c.imag() << ',' << r.phase.rel_phase;
    } else {
      out << ",nan,nan,nan,nan,nan";
    }
    out << ',' << r.est_error << '\n';
  }
}

RunResult run_scenario_text(const std::string& json_text, const fs::path& base_dir, const RunOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  const json doc = apply_overrides(load_json(json_text), opts);
  const Sweep sweep = parse_sweep(doc);
  const Parsed base = parse(doc, base_dir);

  RunResult run;
  run.name = base.name;
  run.digest = fnv1a_hex(doc.dump());
  run.sweep_variable = sweep.variable;
  run.points.resize(sweep.values.size());

  const auto ptr = sweep_pointer(sweep.variable);
  auto point_doc = [&](double v) {
    json d = doc;
    d[ptr] = v;
    return d;
  };
  const int threads = std::max(1, opts.threads);
  if (threads == 1 || sweep.values.size() == 1) {
    for (std::size_t i = 0; i < sweep.values.size(); ++i) {
      run.points[i] = evaluate_point(point_doc(sweep.values[i]), base_dir, sweep.values[i], opts, threads);
    }
  } else {
    std::vector<std::future<void>> jobs;
    for (int t = 0; t < threads; ++t) {
      jobs.push_back(std::async(std::launch::async, [&, t] {
        for (std::size_t i = t; i < sweep.values.size(); i += threads) {
          run.points[i] = evaluate_point(point_doc(sweep.values[i]), base_dir, sweep.values[i], opts, 1);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }
  run.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (opts.write_files) {
    fs::path out = opts.out_dir ? *opts.out_dir : base_dir;
    if (out.is_relative() && opts.out_dir) out = fs::current_path() / out;
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) fail(ErrorKind::IoError, "cannot create " + out.string());

    json report;
    report["scenario"] = run.name;
    report["digest"] = run.digest;
    report["versions"] = {{"cascade", "0.1.0"}, {"eigen", versions_string()}};
    report["wall_clock_s"] = run.wall_seconds;
    report["sweep"] = {{"variable", sweep.variable}, {"values", sweep.values}};
    report["engine"] = to_string(base.engine);
    report["normalization"] = to_string(base.kernel.norm_or(
        base.kernel_kind == KernelKind::Scalar ? Normalization::Bare : Normalization::OverTwoPi));
    json recs = json::array();
    for (const auto& r : run.points) recs.push_back(record_json(r));
    report["records"] = recs;

    run.report_path = out / "report.json";
    run.csv_path = out / "plotdata.csv";
    std::ofstream rj(run.report_path);
    if (!rj) fail(ErrorKind::IoError, "cannot write " + run.report_path.string());
    rj << report.dump(2) << '\n';
    std::ofstream csv(run.csv_path);
    if (!csv) fail(ErrorKind::IoError, "cannot write " + run.csv_path.string());
    write_plot_csv(csv, run);

    std::vector<double> sv;
    std::vector<PhaseReport> rows;
    for (const auto& r : run.points) {
      if (r.ok && r.has_phase) {
        sv.push_back(r.sweep_value);
        rows.push_back(r.phase);
      }
    }
    std::ofstream ph(out / "phases.csv");
    if (!ph) fail(ErrorKind::IoError, "cannot write phases.csv");
    write_phase_csv(ph, sv, rows);
  }
  return run;
}

namespace {

std::string read_file(const fs::path& file) {
  std::ifstream in(file);
  if (!in) fail(ErrorKind::IoError, "cannot open " + file.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

RunResult run_scenario_file(const fs::path& file, const RunOptions& opts) {
  const std::string text = read_file(file);
  return run_scenario_text(text, fs::absolute(file).parent_path(), opts);
}

int verify_scenario_text(const std::string& json_text, const fs::path& base_dir, const RunOptions& opts,
                         std::ostream& out, std::vector<CheckResult>* checks) {
  const json doc = load_json(json_text);
  const json* expect = find(doc, "expect");
  if (!expect || !expect->is_array() || expect->empty()) config_error("expect", "no expectations declared");

  // Validate the expectation block before running anything.
  for (std::size_t e = 0; e < expect->size(); ++e) {
    const std::string ep = "expect[" + std::to_string(e) + "]";
    const json& x = (*expect)[e];
    text(require(x, "column", ep), ep + ".column");
    const bool has_target = find(x, "value") || find(x, "reference");
    if (!has_target && !find(x, "max") && !find(x, "min")) config_error(ep, "needs value, reference, max or min");
    if (has_target) number(require(x, "tol", ep), ep + ".tol");
  }

  const RunResult run = run_scenario_text(json_text, base_dir, opts);
  int failed = 0, passed = 0;
  for (std::size_t e = 0; e < expect->size(); ++e) {
    const std::string ep = "expect[" + std::to_string(e) + "]";
    const json& x = (*expect)[e];
    const std::string column = x["column"].get<std::string>();
    const bool relative = boolean_or(x, "relative", ep, false);
    for (std::size_t i = 0; i < run.points.size(); ++i) {
      const PointRecord& r = run.points[i];
      CheckResult c;
      c.column = column;
      c.point = i;
      if (!r.ok) {
        c.rule = "error:" + r.error_kind;
      } else {
        c.actual = column_of(r, column, false);
        if (const json* v = find(x, "value")) {
          c.target = number(*v, ep + ".value");
        } else if (const json* ref = find(x, "reference")) {
          if (!r.has_reference) config_error(ep + ".reference", "no reference available for this engine");
          text(*ref, ep + ".reference");
          c.target = column_of(r, column, true);
        }
        if (find(x, "value") || find(x, "reference")) {
          c.bound = x["tol"].get<double>();
          const double dev = std::abs(c.actual - c.target);
          c.pass = relative ? dev <= c.bound * std::abs(c.target) : dev <= c.bound;
          c.rule = relative ? "rel<=tol" : "abs<=tol";
        } else if (const json* mx = find(x, "max")) {
          c.bound = number(*mx, ep + ".max");
          c.pass = c.actual <= c.bound;
          c.rule = "max";
        } else {
          c.bound = number(x["min"], ep + ".min");
          c.pass = c.actual >= c.bound;
          c.rule = "min";
        }
      }
      (c.pass ? passed : failed)++;
      out << (c.pass ? "PASS" : "FAIL") << " scenario=" << run.name << " point=" << i
          << " sweep_value=" << fmt(r.sweep_value) << " column=" << column << " actual=" << fmt(c.actual)
          << " target=" << fmt(c.target) << " rule=" << c.rule << " bound=" << fmt(c.bound) << '\n';
      if (checks) checks->push_back(c);
    }
  }
  out << "RESULT " << (failed == 0 ? "pass" : "fail") << " passed=" << passed << " failed=" << failed << '\n';
  return failed == 0 ? 0 : 1;
}

int verify_scenario_file(const fs::path& file, const RunOptions& opts, std::ostream& out) {
  const std::string text = read_file(file);
  return verify_scenario_text(text, fs::absolute(file).parent_path(), opts, out);
}

}  // namespace cascade
