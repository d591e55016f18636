// Quadrature rules, reductions and small numerical helpers.
#ifndef CASCADE_QUADRATURE_HPP
#define CASCADE_QUADRATURE_HPP

#include "cascade/common.hpp"

#include <cstddef>
#include <functional>
#include <vector>

namespace cascade {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule of the given order on [-1, 1]. Rules are cached.
const GaussRule& gauss_legendre(int order);

/// Integrates f over [a, b] with an n-point Gauss-Legendre rule.
template <typename F>
auto integrate_gl(F&& f, double a, double b, int order) {
  const GaussRule& rule = gauss_legendre(order);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  using R = decltype(f(mid));
  R acc = R(0);
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return acc * half;
}

/// Periodic trapezoid rule over [0, 2pi) with n equispaced nodes.
template <typename F>
auto integrate_periodic(F&& f, int n) {
  const double h = kTwoPi / n;
  using R = decltype(f(0.0));
  R acc = R(0);
  for (int i = 0; i < n; ++i) acc += f(h * i);
  return acc * h;
}

/// sin(x)/x with sinc(0) = 1.
double sinc(double x);

/// Root of f in [lo, hi] by bisection; requires a sign change.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol = 1e-14, int max_iter = 200);

/// Compensated (Kahan) accumulator for anything with +, - and a zero value.
template <typename T>
class KahanSum {
 public:
  explicit KahanSum(T zero) : sum_(zero), comp_(zero) {}

  void add(const T& term) {
    T y = term - comp_;
    T t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }

  const T& value() const { return sum_; }

 private:
  T sum_;
  T comp_;
};

/// Pairwise (tree) reduction of term(i) for i in [lo, hi).
template <typename T, typename Term>
T pairwise_sum(const Term& term, std::size_t lo, std::size_t hi, const T& zero) {
  if (hi - lo <= 32) {
    T acc = zero;
    for (std::size_t i = lo; i < hi; ++i) acc += term(i);
    return acc;
  }
  const std::size_t mid = lo + (hi - lo) / 2;
  T left = pairwise_sum<T>(term, lo, mid, zero);
  left += pairwise_sum<T>(term, mid, hi, zero);
  return left;
}

/// Ordinary least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cascade

#endif  // CASCADE_QUADRATURE_HPP
