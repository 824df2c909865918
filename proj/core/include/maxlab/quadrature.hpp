#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace maxlab::quad {

// Gauss-Legendre rule on [-1, 1]. Available sizes: 2-6, 8, 10, 12, 16, 20, 24, 32, 48, 64.
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};
const GaussRule& gauss_rule(int n);

template <class F>
double gauss_legendre(F&& f, double a, double b, const GaussRule& rule) {
  const double m = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) s += rule.w[i] * f(m + h * rule.x[i]);
  return s * h;
}

template <class F>
double gauss_legendre(F&& f, double a, double b, int n) {
  return gauss_legendre(f, a, b, gauss_rule(n));
}

// Integrates f over [lo, hi], a sub-range of [m - h, m + h], after substituting
// t = m - h cos(phi). This absorbs square-root endpoint behaviour at m -/+ h, which is how
// cap-type slice weights vanish. Pieces wider than max_dphi in phi are split.
template <class F>
double cosine_mapped(F&& f, double m, double h, double lo, double hi, const GaussRule& rule,
                     double max_dphi = std::numbers::pi / 6) {
  if (!(hi > lo) || !(h > 0)) return 0.0;
  auto phi_of = [&](double t) { return std::acos(std::clamp((m - t) / h, -1.0, 1.0)); };
  const double p0 = phi_of(lo);
  const double p1 = phi_of(hi);
  const int pieces = std::max(1, static_cast<int>(std::ceil((p1 - p0) / max_dphi)));
  const double dp = (p1 - p0) / pieces;
  double s = 0.0;
  for (int k = 0; k < pieces; ++k) {
    const double a = p0 + k * dp;
    const double b = (k + 1 == pieces) ? p1 : a + dp;
    s += gauss_legendre([&](double phi) { return f(m - h * std::cos(phi)) * h * std::sin(phi); },
                        a, b, rule);
  }
  return s;
}

// Adaptive Gauss-Kronrod (15-point) with relative tolerance; deterministic.
double adaptive(const std::function<double(double)>& f, double a, double b, double rel_tol,
                int max_depth = 15);

}  // namespace maxlab::quad
