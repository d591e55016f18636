#include "cascade/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace cascade {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::KindMismatch: return "KindMismatch";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::SingularSeparation: return "SingularSeparation";
    case ErrorKind::ResonanceSingularity: return "ResonanceSingularity";
    case ErrorKind::InvalidHalfSpace: return "InvalidHalfSpace";
    case ErrorKind::PreconditionViolated: return "PreconditionViolated";
    case ErrorKind::OutsideRegion: return "OutsideRegion";
    case ErrorKind::SaddleNotFound: return "SaddleNotFound";
    case ErrorKind::DegenerateSaddle: return "DegenerateSaddle";
    case ErrorKind::InsufficientBodies: return "InsufficientBodies";
    case ErrorKind::ResponseDomainError: return "ResponseDomainError";
    case ErrorKind::EngineMismatch: return "EngineMismatch";
    case ErrorKind::DegenerateReference: return "DegenerateReference";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

namespace {

// Newton iteration on P_n from Chebyshev-like starting points.
GaussRule build_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged node.
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(int order) {
  if (order < 1) fail(ErrorKind::PreconditionViolated, "Gauss-Legendre order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussRule>> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    if (order == 1) {
      slot = std::make_unique<GaussRule>(GaussRule{{0.0}, {2.0}});
    } else {
      slot = std::make_unique<GaussRule>(build_rule(order));
    }
  }
  return *slot;
}

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    fail(ErrorKind::PreconditionViolated, "bisect: no sign change in bracket");
  }
  for (int i = 0; i < max_iter && (hi - lo) > xtol * (1.0 + std::abs(lo)); ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace cascade
