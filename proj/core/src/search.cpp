#include "maxlab/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace maxlab::search {

namespace {
constexpr double kInvPhi = 0.6180339887498949;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

std::pair<double, double> golden_max(const std::function<double(double)>& g, double a, double b,
                                     double tol, double hint) {
  double best_x = hint, best_v = g(hint);
  auto consider = [&](double x, double v) {
    if (v > best_v) {
      best_v = v;
      best_x = x;
    }
  };
  if (!(b > a)) return {best_x, best_v};
  consider(a, g(a));
  consider(b, g(b));
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double v1 = g(x1), v2 = g(x2);
  consider(x1, v1);
  consider(x2, v2);
  while (b - a > tol) {
    if (v1 >= v2) {
      b = x2;
      x2 = x1;
      v2 = v1;
      x1 = b - kInvPhi * (b - a);
      v1 = g(x1);
      consider(x1, v1);
    } else {
      a = x1;
      x1 = x2;
      v1 = v2;
      x2 = a + kInvPhi * (b - a);
      v2 = g(x2);
      consider(x2, v2);
    }
  }
  return {best_x, best_v};
}

std::vector<Point> coarse_scan(const Objective& f, const Box& box, const std::vector<int>& counts,
                               int keep) {
  const std::size_t n = box.dims();
  std::vector<int> idx(n, 0);
  std::vector<Point> all;
  std::vector<double> x(n);
  while (true) {
    for (std::size_t k = 0; k < n; ++k) {
      const int c = std::max(1, counts[k]);
      if (c == 1)
        x[k] = 0.5 * (box.lo[k] + box.hi[k]);
      else if (idx[k] == c - 1)
        x[k] = box.hi[k];
      else
        x[k] = box.lo[k] + (box.hi[k] - box.lo[k]) * idx[k] / (c - 1);
    }
    const double v = f(x);
    if (v > kNegInf) all.push_back({x, v});
    std::size_t k = 0;
    for (; k < n; ++k) {
      if (++idx[k] < std::max(1, counts[k])) break;
      idx[k] = 0;
    }
    if (k == n) break;
  }
  std::stable_sort(all.begin(), all.end(),
                   [](const Point& a, const Point& b) { return a.value > b.value; });
  if (static_cast<int>(all.size()) > keep) all.resize(static_cast<std::size_t>(keep));
  return all;
}

Point coordinate_ascent(const Objective& f, const Box& box, Point start, std::vector<double> step,
                        double tol, int max_sweeps) {
  const std::size_t n = box.dims();
  Point cur = std::move(start);
  std::vector<double> abs_tol(n);
  for (std::size_t k = 0; k < n; ++k)
    abs_tol[k] = tol * std::max(1.0, box.hi[k] - box.lo[k]);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    bool moved = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double x0 = cur.x[k];
      const double a = std::max(box.lo[k], x0 - step[k]);
      const double b = std::min(box.hi[k], x0 + step[k]);
      std::vector<double> probe = cur.x;
      auto g = [&](double t) {
        probe[k] = t;
        return f(probe);
      };
      const double line_tol = std::max(abs_tol[k], 1e-3 * step[k]);
      auto [xb, vb] = golden_max(g, a, b, line_tol, x0);
      const double delta = std::abs(xb - x0);
      if (vb > cur.value) {
        cur.x[k] = xb;
        cur.value = vb;
      }
      // Shrink the bracket around a converging coordinate, widen it when the edge was hit.
      if (delta >= 0.9 * step[k])
        step[k] *= 2.0;
      else
        step[k] = std::max(4.0 * delta, abs_tol[k]);
      if (delta > abs_tol[k]) moved = true;
    }
    if (!moved) break;
  }
  return cur;
}

std::vector<Point> maximize(const Objective& f, const Box& box, const std::vector<int>& counts,
                            int restarts, double tol) {
  auto seeds = coarse_scan(f, box, counts, std::max(1, restarts));
  std::vector<double> step(box.dims());
  for (std::size_t k = 0; k < box.dims(); ++k) {
    const int c = std::max(2, counts[k]);
    step[k] = (box.hi[k] - box.lo[k]) / (c - 1);
  }
  std::vector<Point> out;
  for (auto& s : seeds) out.push_back(coordinate_ascent(f, box, s, step, tol));
  std::stable_sort(out.begin(), out.end(),
                   [](const Point& a, const Point& b) { return a.value > b.value; });
  return out;
}

}  // namespace maxlab::search
