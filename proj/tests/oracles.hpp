#pragma once

// Independent reference computations for the tests. Everything here works from the breakpoint
// lists alone and uses closed forms or plain grids, never the library's kernels or search.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "maxlab/profile.hpp"

namespace oracle {

// Line profile as plain breakpoints, zero outside.
struct PL {
  std::vector<double> t, v;

  explicit PL(const maxlab::Profile& f) : t(f.breakpoints()), v(f.values()) {}
  PL(std::vector<double> t_, std::vector<double> v_) : t(std::move(t_)), v(std::move(v_)) {}

  double operator()(double x) const {
    if (x < t.front() || x > t.back()) return 0.0;
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.end()) return v.back();
    const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
    const double u = (x - t[k]) / (t[k + 1] - t[k]);
    return v[k] + u * (v[k + 1] - v[k]);
  }

  // int_{-inf}^x f by the trapezoid rule on each piece (exact for PL).
  double primitive(double x) const {
    double s = 0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      if (x <= t[k]) break;
      const double b = std::min(x, t[k + 1]);
      s += 0.5 * (v[k] + (*this)(b)) * (b - t[k]);
    }
    return s;
  }

  double average(double a, double b) const {
    if (b <= a) return (*this)(a);
    return (primitive(b) - primitive(a)) / (b - a);
  }

  // Sum over pieces of int (A + B u) K(u) du with u = s - y, from closed forms of the kernel
  // moments supplied by `moments(u0, u1) -> {m0, m1}`.
  template <class Moments>
  double convolve(double y, Moments moments) const {
    double s = 0;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
      const double slope = (v[k + 1] - v[k]) / (t[k + 1] - t[k]);
      const double A = v[k] + slope * (y - t[k]);
      const auto [m0, m1] = moments(t[k] - y, t[k + 1] - y);
      s += A * m0 + slope * m1;
    }
    return s;
  }
};

// Heat kernel (4 pi t)^{-1/2} exp(-x^2 / 4t): Gaussian with variance 2t.
inline double heat(const PL& f, double y, double t) {
  const double sig = std::sqrt(2.0 * t);
  auto cdf = [&](double u) { return 0.5 * std::erfc(-u / (sig * std::numbers::sqrt2)); };
  auto pdf = [&](double u) {
    return std::exp(-0.5 * u * u / (sig * sig)) / (sig * std::sqrt(2.0 * std::numbers::pi));
  };
  return f.convolve(y, [&](double u0, double u1) {
    return std::pair{cdf(u1) - cdf(u0), sig * sig * (pdf(u0) - pdf(u1))};
  });
}

// Poisson kernel t / (pi (x^2 + t^2)).
inline double poisson(const PL& f, double y, double t) {
  return f.convolve(y, [&](double u0, double u1) {
    const double m0 = (std::atan(u1 / t) - std::atan(u0 / t)) / std::numbers::pi;
    const double m1 = t / (2.0 * std::numbers::pi) * std::log((u1 * u1 + t * t) / (u0 * u0 + t * t));
    return std::pair{m0, m1};
  });
}

// Brute-force maximum of obj over a box: a dense grid, then the best few cells are re-gridded at
// a tenth of the spacing, several times over.
inline double grid_max(const std::function<double(double, double)>& obj, double lo0, double hi0,
                       double lo1, double hi1, int n0, int n1, int levels = 6, int keep = 6) {
  struct Cand {
    double v, p0, p1;
  };
  std::vector<Cand> cands;
  auto scan = [&](double a0, double b0, double a1, double b1, int m0, int m1,
                  std::vector<Cand>& out) {
    for (int i = 0; i < m0; ++i) {
      const double p0 = m0 == 1 ? 0.5 * (a0 + b0) : a0 + (b0 - a0) * i / (m0 - 1);
      for (int j = 0; j < m1; ++j) {
        const double p1 = m1 == 1 ? 0.5 * (a1 + b1) : a1 + (b1 - a1) * j / (m1 - 1);
        out.push_back({obj(p0, p1), p0, p1});
      }
    }
  };
  scan(lo0, hi0, lo1, hi1, n0, n1, cands);
  double h0 = n0 > 1 ? (hi0 - lo0) / (n0 - 1) : 0, h1 = n1 > 1 ? (hi1 - lo1) / (n1 - 1) : 0;
  double best = -INFINITY;
  for (const auto& c : cands) best = std::max(best, c.v);
  for (int l = 0; l < levels; ++l) {
    std::partial_sort(cands.begin(), cands.begin() + std::min<std::size_t>(keep, cands.size()),
                      cands.end(), [](const Cand& a, const Cand& b) { return a.v > b.v; });
    cands.resize(std::min<std::size_t>(keep, cands.size()));
    std::vector<Cand> next;
    for (const auto& c : cands)
      scan(std::max(lo0, c.p0 - h0), std::min(hi0, c.p0 + h0), std::max(lo1, c.p1 - h1),
           std::min(hi1, c.p1 + h1), n0 > 1 ? 21 : 1, n1 > 1 ? 21 : 1, next);
    cands = std::move(next);
    h0 /= 10;
    h1 /= 10;
    for (const auto& c : cands) best = std::max(best, c.v);
  }
  return best;
}

// Uncentered: sup over a <= x <= b.
inline double uncentered(const PL& f, double x) {
  const double L = std::max(x - f.t.front(), f.t.back() - x) * 2.0 + 1.0;
  const double v = grid_max([&](double a, double b) { return f.average(x - a, x + b); }, 0, L, 0, L,
                            400, 400);
  return std::max(v, f(x));
}

inline double centered(const PL& f, double x) {
  const double L = std::max(x - f.t.front(), f.t.back() - x) * 2.0 + 1.0;
  const double v = grid_max([&](double r, double) { return f.average(x - r, x + r); }, 0, L, 0, 0,
                            20000, 1);
  return std::max(v, f(x));
}

// Intervals [c - r, c + r] with |x - c| <= alpha r.
inline double cube(const PL& f, double x, double alpha) {
  const double L = std::max(x - f.t.front(), f.t.back() - x) * 2.0 + 1.0;
  const double v = grid_max(
      [&](double lr, double s) {
        const double r = std::exp(lr);
        const double c = x + s * alpha * r;
        return f.average(c - r, c + r);
      },
      std::log(1e-9), std::log(L), -1, 1, 600, alpha > 0 ? 81 : 1);
  return std::max(v, f(x));
}

// Flows at (y, t) with |x - y| <= alpha * gap(t); t on a log grid.
inline double flow(const PL& f, double x, double alpha, bool heat_kernel) {
  const double lo = std::log(1e-12), hi = std::log(1e6);
  const double v = grid_max(
      [&](double lt, double s) {
        const double t = std::exp(lt);
        const double y = x + s * alpha * (heat_kernel ? std::sqrt(t) : t);
        return heat_kernel ? heat(f, y, t) : poisson(f, y, t);
      },
      lo, hi, -1, 1, 800, alpha > 0 ? 81 : 1);
  return std::max(v, f(x));
}

}  // namespace oracle
