#include "maxlab/kernels.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "maxlab/errors.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Rule used on cosine-mapped pieces; see the accuracy tests in test_kernels.
const quad::GaussRule& mapped_rule() { return quad::gauss_rule(16); }

// int_0^theta sin^m
double sin_power_integral(int m, double theta) {
  if (m == 0) return theta;
  if (m == 1) {
    const double h = std::sin(0.5 * theta);
    return 2.0 * h * h;
  }
  // the recursion cancels for small caps; sin^m is smooth there so Gauss-Legendre is exact enough
  if (theta < 0.5)
    return quad::gauss_legendre([m](double u) { return std::pow(std::sin(u), m); }, 0.0, theta, 20);
  const double s = std::sin(theta), c = std::cos(theta);
  return -std::pow(s, m - 1) * c / m + (m - 1.0) / m * sin_power_integral(m - 2, theta);
}

// Average of f(c + z) where z = -s cos(phi) has density sin^p(phi): the axial marginal of a small
// ball of dimension p (p = 2 for a cap on S^2). Used when a knot sits inside a ball much smaller
// than its distance to the origin; working in z keeps the weights exact, whereas the radius
// itself only resolves s to eps * c / s.
double axial_average(const Profile& f, double c, double s, int p) {
  std::vector<double> cuts{0.0, kPi};
  for (double k : f.knots())
    if (k > c - s && k < c + s) cuts.push_back(std::acos(std::clamp((c - k) / s, -1.0, 1.0)));
  std::sort(cuts.begin(), cuts.end());
  const auto& rule = quad::gauss_rule(20);
  double num = 0, den = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    num += quad::gauss_legendre(
        [&](double phi) { return f(c - s * std::cos(phi)) * std::pow(std::sin(phi), p); }, cuts[i],
        cuts[i + 1], rule);
    den += quad::gauss_legendre([&](double phi) { return std::pow(std::sin(phi), p); }, cuts[i],
                                cuts[i + 1], rule);
  }
  return num / den;
}

// Polar angle of the cap {|y| = r} ∩ B_s(z), |z| = rho. Returns 0 (empty) .. pi (full).
double cap_angle(double r, double rho, double s) {
  if (r <= 0) return s > rho ? kPi : 0.0;
  if (rho <= 0) return r < s ? kPi : 0.0;
  // 1 - cos(theta) = (s^2 - (r - rho)^2) / (2 r rho), written without cancellation.
  const double dr = r - rho;
  const double num = (s - dr) * (s + dr);
  if (num <= 0) return 0.0;
  const double q = num / (4.0 * r * rho);
  if (q >= 1) return kPi;
  return 2.0 * std::asin(std::sqrt(q));
}

// Adds cuts that resolve the pole of the cap geometry at the origin when a region starts close
// to it relative to its width.
void add_origin_cuts(std::vector<double>& cuts, double lo, double hi) {
  if (lo <= 0) return;
  for (double step = lo; lo + step < hi; step *= 2.0) cuts.push_back(lo + step);
}

// Integrates g(r) * kernel(r) over r in [lo, hi] for PL-friendly g: splits at the knots of f,
// uses exact Gauss-Legendre when `polynomial_order` > 0 and the cosine map otherwise.
template <class G>
double radial_region(const Profile& f, double lo, double hi, G&& integrand, int polynomial_nodes,
                     bool cosine, double m, double h) {
  if (!(hi > lo)) return 0.0;
  std::vector<double> cuts{lo, hi};
  for (double k : f.knots())
    if (k > lo && k < hi) cuts.push_back(k);
  if (cosine) add_origin_cuts(cuts, lo, hi);
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    if (cosine)
      s += quad::cosine_mapped(integrand, m, h, a, b, mapped_rule());
    else
      s += quad::gauss_legendre(integrand, a, b, quad::gauss_rule(polynomial_nodes));
  }
  return s;
}

double gauss_mass(double za, double zb) {
  // P(za < Z < zb) for standard normal Z, written to avoid cancellation in the tails.
  constexpr double r2 = std::numbers::sqrt2;
  if (za >= 0) return 0.5 * (std::erfc(za / r2) - std::erfc(zb / r2));
  if (zb <= 0) return 0.5 * (std::erfc(-zb / r2) - std::erfc(-za / r2));
  return 1.0 - 0.5 * std::erfc(-za / r2) - 0.5 * std::erfc(zb / r2);
}

double std_normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(kTwoPi); }

// exp(-z) I_0(z) for z >= 0.
double scaled_bessel_i0(double z) {
  if (z < 50.0) return std::cyl_bessel_i(0.0, z) * std::exp(-z);
  double term = 1.0, sum = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= (2.0 * k - 1.0) * (2.0 * k - 1.0) / (8.0 * k * z);
    sum += term;
    if (term < 1e-17 * sum) break;
  }
  return sum / std::sqrt(kTwoPi * z);
}

// Half-width outside which the heat kernel carries mass below 1e-12 in every dimension used.
double heat_window(double t) { return 9.0 * std::sqrt(2.0 * t); }

// Angular integral of the radial kernel: K_d(rho, r, t) = int_{S^{d-1}} K_t(|rho e - r w|) dw.
double radial_heat_kernel(int d, double rho, double r, double t) {
  const double z = rho * r / (2.0 * t);
  const double base = std::exp(-(rho - r) * (rho - r) / (4.0 * t));
  const double norm = std::pow(4.0 * kPi * t, -0.5 * d);
  if (d == 2) return norm * base * kTwoPi * scaled_bessel_i0(z);
  if (d == 3) {
    // 2 pi * 2 sinh(z) / z * exp(-(rho^2 + r^2) / 4t)
    if (z < 1e-12) return norm * base * 4.0 * kPi;
    return norm * kTwoPi / z * base * -std::expm1(-2.0 * z);
  }
  const double ang = quad::adaptive(
      [&](double th) { return std::exp(z * (std::cos(th) - 1.0)) * std::pow(std::sin(th), d - 2); },
      0.0, kPi, 1e-10);
  return norm * base * sphere_area(d - 2) * ang;
}

double radial_poisson_kernel(int d, double rho, double r, double t) {
  const double cd = std::tgamma(0.5 * (d + 1)) / std::pow(kPi, 0.5 * (d + 1));
  const double A = rho * rho + r * r + t * t;
  const double B = 2.0 * rho * r;
  if (d == 3) return cd * t * kTwoPi * 2.0 / ((A - B) * (A + B));
  if (d == 2) {
    const double k = std::sqrt(std::clamp(2.0 * B / (A + B), 0.0, 1.0));
    return cd * t * 2.0 * 2.0 * std::comp_ellint_2(k) / ((A - B) * std::sqrt(A + B));
  }
  const double ang = quad::adaptive(
      [&](double th) {
        return std::pow(std::sin(th), d - 2) / std::pow(A - B * std::cos(th), 0.5 * (d + 1));
      },
      0.0, kPi, 1e-10);
  return cd * t * sphere_area(d - 2) * ang;
}

double line_heat(const Profile& f, double y, double t) {
  const double sigma = std::sqrt(2.0 * t);
  const auto& kt = f.knots();
  const auto& kv = f.knot_values();
  const double lo = y - heat_window(t), hi = y + heat_window(t);
  auto first = std::upper_bound(kt.begin(), kt.end(), lo);
  std::size_t k = first == kt.begin() ? 0 : static_cast<std::size_t>(first - kt.begin()) - 1;
  double s = 0.0;
  for (; k + 1 < kt.size() && kt[k] < hi; ++k) {
    const double a = kt[k], b = kt[k + 1];
    const double q = (kv[k + 1] - kv[k]) / (b - a);
    const double fy = kv[k] + q * (y - a);
    const double za = (a - y) / sigma, zb = (b - y) / sigma;
    s += fy * gauss_mass(za, zb) + q * sigma * (std_normal_pdf(za) - std_normal_pdf(zb));
  }
  return s;
}

double line_poisson(const Profile& f, double y, double t) {
  const auto& kt = f.knots();
  const auto& kv = f.knot_values();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < kt.size(); ++k) {
    const double a = kt[k] - y, b = kt[k + 1] - y;
    const double q = (kv[k + 1] - kv[k]) / (b - a);
    const double fy = kv[k] - q * a;
    s += fy * (std::atan2(b, t) - std::atan2(a, t)) / kPi +
         q * t / kTwoPi * std::log((b * b + t * t) / (a * a + t * t));
  }
  return s;
}

double radial_flow(const Profile& f, KernelKind kernel, double rho, double t) {
  const int d = f.domain().dim;
  double lo = 0.0, hi = f.support_upper();
  const double width = kernel == KernelKind::kHeat ? std::sqrt(2.0 * t) : t;
  if (kernel == KernelKind::kHeat) {
    lo = std::max(lo, rho - heat_window(t));
    hi = std::min(hi, rho + heat_window(t));
  }
  if (!(hi > lo)) return 0.0;
  // Pieces are bounded by knots and by distances from rho that grow with the kernel's own
  // scale, so a fixed rule on each piece sees a smooth, well-resolved integrand.
  std::vector<double> cuts{lo, hi};
  for (double k : f.knots())
    if (k > lo && k < hi) cuts.push_back(k);
  auto cut_at = [&](double c) {
    for (double p : {rho - c * width, rho + c * width})
      if (p > lo && p < hi) cuts.push_back(p);
  };
  if (kernel == KernelKind::kHeat) {
    for (double c : {0.25, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0}) cut_at(c);
  } else {
    for (double c = 0.25; c * width < 2.0 * (hi - lo); c *= 1.5) cut_at(c);
  }
  if (rho > lo && rho < hi) cuts.push_back(rho);
  std::sort(cuts.begin(), cuts.end());
  auto g = [&](double r) {
    const double k = kernel == KernelKind::kHeat ? radial_heat_kernel(d, rho, r, t)
                                                 : radial_poisson_kernel(d, rho, r, t);
    return f(r) * k * std::pow(r, d - 1);
  };
  const auto& rule = quad::gauss_rule(20);
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i]) s += quad::gauss_legendre(g, cuts[i], cuts[i + 1], rule);
  return s;
}

// Arc length of the circle of radius r inside the axis-parallel box [x0,x1] x [y0,y1].
double arc_inside_box(double r, double x0, double x1, double y0, double y1) {
  if (r <= 0) return (x0 <= 0 && 0 <= x1 && y0 <= 0 && 0 <= y1) ? kTwoPi : 0.0;
  std::array<double, 10> ang{};
  int n = 0;
  auto add_cos = [&](double c) {
    if (std::abs(c) < r) {
      const double a = std::acos(c / r);
      ang[n++] = a;
      ang[n++] = kTwoPi - a;
    }
  };
  auto add_sin = [&](double s) {
    if (std::abs(s) < r) {
      const double a = std::asin(s / r);
      ang[n++] = a < 0 ? a + kTwoPi : a;
      ang[n++] = kPi - a;
    }
  };
  add_cos(x0);
  add_cos(x1);
  add_sin(y0);
  add_sin(y1);
  auto inside = [&](double th) {
    const double x = r * std::cos(th), y = r * std::sin(th);
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  };
  if (n == 0) return inside(0.0) ? kTwoPi : 0.0;
  std::sort(ang.begin(), ang.begin() + n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    const double a = ang[i];
    const double b = (i + 1 < n) ? ang[i + 1] : ang[0] + kTwoPi;
    if (b - a <= 0) continue;
    if (inside(0.5 * (a + b))) total += b - a;
  }
  return total;
}

}  // namespace

double interval_average(const Profile& f, double a, double b) {
  // Search parameters can cross by a rounding error.
  if (a > b && a - b <= 1e-12 * (1.0 + std::abs(a) + std::abs(b))) b = a;
  if (a > b) throw InvalidInput(fmt::format("interval_average: a = {} > b = {}", a, b));
  if (f.domain().periodic() && b - a > kTwoPi * (1 + 1e-12))
    throw InvalidInput(fmt::format("interval_average: arc length {} exceeds 2pi", b - a));
  if (a == b) return f(a);
  const double len = b - a;
  const double mid = 0.5 * (a + b);
  if (len < 1e-300) return f(mid);
  if (len < 1e-4 * (1.0 + std::abs(a) + std::abs(b))) {
    // Differences of the primitive cancel on short intervals; trapezoids between the knots inside
    // are exact for a PL profile.
    std::vector<double> cuts{a, b};
    const bool periodic = f.domain().periodic();
    for (double k : f.knots()) {
      if (periodic) k += kTwoPi * std::ceil((a - k) / kTwoPi);
      if (k > a && k < b) cuts.push_back(k);
    }
    std::sort(cuts.begin(), cuts.end());
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      s += 0.5 * (f(cuts[i]) + f(cuts[i + 1])) * (cuts[i + 1] - cuts[i]);
    return s / len;
  }
  return f.integral(a, b) / len;
}

double slice_weight(int d, double r, double rho_c, double s) {
  if (d < 2) throw InvalidInput("slice_weight: d >= 2 required");
  if (r <= 0 || s <= 0) return 0.0;
  const double theta = cap_angle(r, rho_c, s);
  if (theta <= 0) return 0.0;
  if (theta >= kPi) return sphere_area(d - 1) * std::pow(r, d - 1);
  return std::pow(r, d - 1) * sphere_area(d - 2) * sin_power_integral(d - 2, theta);
}

double ball_average_radial(const Profile& f, double rho_c, double s) {
  if (f.domain().kind != DomainKind::kRadialHalfLine)
    throw InvalidInput("ball_average_radial: radial profile required");
  if (s < 0 && s >= -1e-12 * (1.0 + std::abs(rho_c))) s = 0;
  if (s < 0) throw InvalidInput(fmt::format("ball_average_radial: negative radius {}", s));
  rho_c = std::abs(rho_c);
  if (s == 0) return f(rho_c);
  const int d = f.domain().dim;
  const Domain& dom = f.domain();
  if (s < 1e-4 * rho_c) {
    // Tiny ball on a linear piece: E|y| = rho + (d-1) s^2 / (2 (d+2) rho) + O(s^4 / rho^3).
    const double lo = rho_c - s, hi = rho_c + s;
    const auto& kt = f.knots();
    const bool linear = std::none_of(kt.begin(), kt.end(), [&](double k) { return k > lo && k < hi; });
    if (linear) {
      const double b = f.slope_right(lo);
      return f(rho_c) + b * (d - 1) * s * s / (2.0 * (d + 2) * rho_c);
    }
    // A knot inside: |y| ~ rho + z with z distributed as the axial marginal of the ball.
    const double b = 0.5 * (f.slope_right(rho_c) + f.slope_left(rho_c));
    return axial_average(f, rho_c, s, d) + b * (d - 1) * s * s / (2.0 * (d + 2) * rho_c);
  }
  double total = 0.0;
  // Region where the whole sphere {|y| = r} lies in the ball.
  const double full_hi = std::max(0.0, s - rho_c);
  if (full_hi > 0) {
    std::vector<double> cuts{0.0, full_hi};
    for (double k : f.knots())
      if (k > 0 && k < full_hi) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    double inner = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      inner += dom.integrate_linear(cuts[i], cuts[i + 1], f(cuts[i]), f(cuts[i + 1]));
    total += sphere_area(d - 1) * inner;
  }
  if (rho_c > 0) {
    const double lo = std::abs(rho_c - s);
    const double hi = rho_c + s;
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    auto integrand = [&](double r) { return f(r) * slice_weight(d, r, rho_c, s); };
    const bool odd = d % 2 == 1;
    total += radial_region(f, lo, std::min(hi, std::max(f.support_upper(), lo)), integrand, d + 1,
                           !odd, m, h);
  }
  const double volume = sphere_area(d - 1) * std::pow(s, d) / d;
  return total / volume;
}

double ball_gradient_radial(const Profile& f, double center, double s) {
  if (f.domain().kind != DomainKind::kRadialHalfLine)
    throw InvalidInput("ball_gradient_radial: radial profile required");
  if (s <= 0) return 0.0;
  const int d = f.domain().dim;
  const double rho = std::abs(center);
  if (rho == 0) return 0.0;
  const double lo = std::abs(rho - s), hi = rho + s;
  const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
  const double c = sphere_area(d - 2) / (d - 1.0);
  auto integrand = [&](double r) {
    const double th = cap_angle(r, rho, s);
    // f' is piecewise constant; the pieces are split at knots so the midpoint slope is exact.
    return std::pow(r, d - 1) * std::pow(std::sin(th), d - 1);
  };
  std::vector<double> cuts{lo, std::min(hi, std::max(f.support_upper(), lo))};
  for (double k : f.knots())
    if (k > cuts[0] && k < cuts[1]) cuts.push_back(k);
  std::sort(cuts.begin(), cuts.end());
  const bool odd = d % 2 == 1;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (!(b > a)) continue;
    const double slope = f.slope_right(0.5 * (a + b));
    if (slope == 0) continue;
    double piece;
    if (odd) {
      piece = quad::gauss_legendre(integrand, a, b, quad::gauss_rule(d + 1));
    } else {
      std::vector<double> sub{a, b};
      add_origin_cuts(sub, a, b);
      std::sort(sub.begin(), sub.end());
      piece = 0.0;
      for (std::size_t j = 0; j + 1 < sub.size(); ++j)
        piece += quad::cosine_mapped(integrand, m, h, sub[j], sub[j + 1], mapped_rule());
    }
    total += slope * piece;
  }
  const double volume = sphere_area(d - 1) * std::pow(s, d) / d;
  return (center > 0 ? 1.0 : -1.0) * c * total / volume;
}

double cube_average_slices(const Profile& f, const CubeSpec& q) {
  if (q.half_side < 0) throw InvalidInput("cube_average: negative half-side");
  if (q.dim == 1) {
    if (f.domain().kind != DomainKind::kLine) throw Unsupported("cube_average d=1: line profile");
    return interval_average(f, q.c1 - q.half_side, q.c1 + q.half_side);
  }
  if (q.dim != 2) throw Unsupported(fmt::format("cube_average: unsupported dim {}", q.dim));
  if (f.domain().kind != DomainKind::kRadialHalfLine || f.domain().dim != 2)
    throw Unsupported("cube_average d=2: radial profile with dim 2 required");
  const double h = q.half_side;
  if (h == 0) return f(std::hypot(q.c1, q.c2));
  // Work in the square's frame: the circles |y| = r are rotation invariant.
  const double cp = std::cos(q.phi), sp = std::sin(q.phi);
  const double X = cp * q.c1 + sp * q.c2;
  const double Y = -sp * q.c1 + cp * q.c2;
  const double x0 = X - h, x1 = X + h, y0 = Y - h, y1 = Y + h;
  std::vector<double> brk;
  const double dx = (x0 > 0) ? x0 : (x1 < 0 ? -x1 : 0.0);
  const double dy = (y0 > 0) ? y0 : (y1 < 0 ? -y1 : 0.0);
  const double rmin = std::hypot(dx, dy);
  const double rmax = std::hypot(std::max(std::abs(x0), std::abs(x1)),
                                 std::max(std::abs(y0), std::abs(y1)));
  brk.push_back(rmin);
  brk.push_back(rmax);
  for (double v : {x0, x1, y0, y1})
    if (std::abs(v) > rmin && std::abs(v) < rmax) brk.push_back(std::abs(v));
  for (double cx : {x0, x1})
    for (double cy : {y0, y1}) {
      const double c = std::hypot(cx, cy);
      if (c > rmin && c < rmax) brk.push_back(c);
    }
  std::sort(brk.begin(), brk.end());
  brk.erase(std::unique(brk.begin(), brk.end()), brk.end());
  const double top = f.support_upper();
  auto integrand = [&](double r) { return f(r) * r * arc_inside_box(r, x0, x1, y0, y1); };
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < brk.size(); ++i) {
    const double a = brk[i], b = std::min(brk[i + 1], top);
    if (!(b > a)) continue;
    const double m = 0.5 * (brk[i] + brk[i + 1]), hh = 0.5 * (brk[i + 1] - brk[i]);
    std::vector<double> cuts{a, b};
    for (double k : f.knots())
      if (k > a && k < b) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j)
      total += quad::cosine_mapped(integrand, m, hh, cuts[j], cuts[j + 1], mapped_rule());
  }
  return total / (4.0 * h * h);
}

namespace {

// Integrals of r^0 and r^1 over (triangle O, A, B) intersected with the disc of radius R, signed
// by the orientation of the triangle. The edge AB is parametrised by the signed distance s from
// the foot of the perpendicular from O.
std::array<double, 2> triangle_moments(double ax, double ay, double bx, double by, double R) {
  const double ex = bx - ax, ey = by - ay;
  const double len = std::hypot(ex, ey);
  const double cross = ax * by - ay * bx;
  if (len == 0 || cross == 0) return {0.0, 0.0};
  const double ux = ex / len, uy = ey / len;
  const double p = std::abs(cross) / len;
  const double sa = ax * ux + ay * uy, sb = bx * ux + by * uy;
  // Orientation: with p >= 0 fixed, moving from A to B sweeps the angle atan(s / p) in the
  // direction of the sign of cross.
  const double sign = cross > 0 ? 1.0 : -1.0;
  auto edge0 = [&](double s) { return 0.5 * p * s; };
  auto edge1 = [&](double s) {
    return (p * s * std::hypot(p, s) + p * p * p * std::asinh(s / p)) / 6.0;
  };
  auto ang = [&](double s) { return std::atan2(s, p); };
  const double lo = std::min(sa, sb), hi = std::max(sa, sb);
  const double sR = R > p ? std::sqrt((R - p) * (R + p)) : 0.0;
  double m0 = 0, m1 = 0;
  auto cap = [&](double a, double b) {
    if (!(b > a)) return;
    const double dphi = ang(b) - ang(a);
    m0 += 0.5 * R * R * dphi;
    m1 += R * R * R / 3.0 * dphi;
  };
  auto edge = [&](double a, double b) {
    if (!(b > a)) return;
    m0 += edge0(b) - edge0(a);
    m1 += edge1(b) - edge1(a);
  };
  cap(lo, std::min(hi, -sR));
  edge(std::max(lo, -sR), std::min(hi, sR));
  cap(std::max(lo, sR), hi);
  return {sign * m0, sign * m1};
}

// Square of half-side h centred at distance rho, with the radial direction (a, b) in the square's
// frame, for h much smaller than rho. In radial and tangential offsets (z, w),
// |y| = rho + z + w^2 / (2 rho) + O(h^3 / rho^2), so to that order
// f(|y|) = f(rho + z) + f'(rho + z) w^2 / (2 rho). For fixed z the square's chord is [w0, w1],
// and the z integrand is piecewise polynomial between knots and vertex projections.
// Differencing the disc moments instead cancels to eps rho^2 / h^2.
double small_square_average(const Profile& f, double rho, double a, double b, double h) {
  double vz[4], vw[4];
  const double sx[4] = {-h, h, h, -h}, sy[4] = {-h, -h, h, h};
  for (int i = 0; i < 4; ++i) {
    vz[i] = sx[i] * a + sy[i] * b;
    vw[i] = -sx[i] * b + sy[i] * a;
  }
  auto chord = [&](double z) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int i = 0; i < 4; ++i) {
      const int j = (i + 1) % 4;
      const double z0 = std::min(vz[i], vz[j]), z1 = std::max(vz[i], vz[j]);
      if (z < z0 || z > z1) continue;
      if (z1 > z0) {
        const double w = vw[i] + (vw[j] - vw[i]) * (z - vz[i]) / (vz[j] - vz[i]);
        lo = std::min(lo, w);
        hi = std::max(hi, w);
      } else {  // edge perpendicular to the radial direction
        lo = std::min({lo, vw[i], vw[j]});
        hi = std::max({hi, vw[i], vw[j]});
      }
    }
    return std::pair{lo, hi};
  };
  std::vector<double> cuts(vz, vz + 4);
  const double zlo = *std::min_element(vz, vz + 4), zhi = *std::max_element(vz, vz + 4);
  for (double k : f.knots())
    if (k - rho > zlo && k - rho < zhi) cuts.push_back(k - rho);
  std::sort(cuts.begin(), cuts.end());
  double total = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    if (!(cuts[i + 1] > cuts[i])) continue;
    const double slope = f.slope_right(rho + 0.5 * (cuts[i] + cuts[i + 1]));
    total += quad::gauss_legendre(
        [&](double z) {
          const auto [w0, w1] = chord(z);
          if (!(w1 > w0)) return 0.0;
          return f(rho + z) * (w1 - w0) + slope * (w1 * w1 * w1 - w0 * w0 * w0) / (6.0 * rho);
        },
        cuts[i], cuts[i + 1], 4);
  }
  return total / (4.0 * h * h);
}

}  // namespace

double cube_average(const Profile& f, const CubeSpec& q) {
  if (q.dim != 2) return cube_average_slices(f, q);
  if (q.half_side < 0) throw InvalidInput("cube_average: negative half-side");
  if (f.domain().kind != DomainKind::kRadialHalfLine || f.domain().dim != 2)
    throw Unsupported("cube_average d=2: radial profile with dim 2 required");
  const double h = q.half_side;
  if (h == 0) return f(std::hypot(q.c1, q.c2));
  const double cp = std::cos(q.phi), sp = std::sin(q.phi);
  const double X = cp * q.c1 + sp * q.c2;
  const double Y = -sp * q.c1 + cp * q.c2;
  const double rho = std::hypot(X, Y);
  if (h < 1e-3 * rho) return small_square_average(f, rho, X / rho, Y / rho, h);
  const double vx[4] = {X - h, X + h, X + h, X - h};
  const double vy[4] = {Y - h, Y - h, Y + h, Y + h};
  auto moments = [&](double R) {
    std::array<double, 2> m{0.0, 0.0};
    if (R <= 0) return m;
    for (int i = 0; i < 4; ++i) {
      const int j = (i + 1) % 4;
      const auto t = triangle_moments(vx[i], vy[i], vx[j], vy[j], R);
      m[0] += t[0];
      m[1] += t[1];
    }
    return m;
  };
  const double dx = std::max({vx[0], -vx[1], 0.0});
  const double dy = std::max({vy[0], -vy[2], 0.0});
  const double rmin = std::hypot(dx, dy);
  const double rmax = std::hypot(std::max(std::abs(vx[0]), std::abs(vx[1])),
                                 std::max(std::abs(vy[0]), std::abs(vy[2])));
  std::vector<double> rs{rmin};
  for (double k : f.knots())
    if (k > rmin && k < rmax) rs.push_back(k);
  rs.push_back(rmax);
  // Between consecutive radii f is linear: f = f(r_i) + beta (r - r_i).
  double total = 0.0;
  auto prev = moments(rs[0]);
  for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
    const auto next = moments(rs[i + 1]);
    const double a = rs[i], b = rs[i + 1];
    if (b > a) {
      const double fa = f(a), fb = f(b);
      const double beta = (fb - fa) / (b - a);
      const double d0 = next[0] - prev[0], d1 = next[1] - prev[1];
      total += fa * d0 + beta * (d1 - a * d0);
    }
    prev = next;
  }
  return total / (4.0 * h * h);
}

double cube_average_tensor(const Profile& f, const CubeSpec& q, int nodes) {
  if (q.dim == 1) return cube_average(f, q);
  const auto& rule = quad::gauss_rule(nodes);
  const double h = q.half_side;
  const double cp = std::cos(q.phi), sp = std::sin(q.phi);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i)
    for (std::size_t j = 0; j < rule.x.size(); ++j) {
      const double u = h * rule.x[i], v = h * rule.x[j];
      const double x = q.c1 + cp * u - sp * v;
      const double y = q.c2 + sp * u + cp * v;
      s += rule.w[i] * rule.w[j] * f(std::hypot(x, y));
    }
  return s / 4.0;
}

double heat_kernel(int d, double r, double t) {
  return std::pow(4.0 * kPi * t, -0.5 * d) * std::exp(-r * r / (4.0 * t));
}

double poisson_kernel(int d, double r, double t) {
  const double cd = std::tgamma(0.5 * (d + 1)) / std::pow(kPi, 0.5 * (d + 1));
  return cd * t / std::pow(r * r + t * t, 0.5 * (d + 1));
}

double angular_kernel_average(const Profile& f, KernelKind kernel, ParabolicPoint p) {
  if (!(p.t > 0)) throw InvalidInput(fmt::format("angular_kernel_average: t = {} <= 0", p.t));
  switch (f.domain().kind) {
    case DomainKind::kLine:
      return kernel == KernelKind::kHeat ? line_heat(f, p.y, p.t) : line_poisson(f, p.y, p.t);
    case DomainKind::kRadialHalfLine:
      return radial_flow(f, kernel, std::abs(p.y), p.t);
    default:
      throw Unsupported("angular_kernel_average: line or radial profile required");
  }
}

double geodesic_ball_average(const Profile& f, double theta_c, double s) {
  if (s < 0 && s >= -1e-12) s = 0;
  if (s > kPi && s <= kPi * (1 + 1e-12)) s = kPi;
  if (f.domain().kind == DomainKind::kCircle) {
    if (s < 0 || s > kPi) throw InvalidInput("geodesic_ball_average: radius outside (0, pi]");
    return interval_average(f, theta_c - s, theta_c + s);
  }
  if (f.domain().kind != DomainKind::kPolarInterval || f.domain().dim != 2)
    throw Unsupported("geodesic_ball_average: circle or polar:2 profile required");
  if (s < 0 || s > kPi) throw InvalidInput("geodesic_ball_average: radius outside (0, pi]");
  if (theta_c < 0 && theta_c >= -1e-12) theta_c = 0;
  if (theta_c > kPi && theta_c <= kPi * (1 + 1e-12)) theta_c = kPi;
  if (theta_c < 0 || theta_c > kPi)
    throw InvalidInput("geodesic_ball_average: centre angle outside [0, pi]");
  if (s == 0) return f(theta_c);
  const double st = std::sin(theta_c), ct = std::cos(theta_c);
  if (s < 1e-4 * std::min(theta_c, kPi - theta_c)) {
    // Small cap on a linear piece: E[theta] = theta_c + s^2 cot(theta_c) / 8 + O(s^4).
    const double lo = theta_c - s, hi = theta_c + s;
    const auto& kt = f.knots();
    if (std::none_of(kt.begin(), kt.end(), [&](double k) { return k > lo && k < hi; }))
      return f(theta_c) + f.slope_right(lo) * s * s * ct / (8.0 * st);
    const double b = 0.5 * (f.slope_right(theta_c) + f.slope_left(theta_c));
    return axial_average(f, theta_c, s, 2) + b * s * s * ct / (8.0 * st);
  }
  const double half = std::sin(0.5 * s);
  const double area = 2.0 * kTwoPi * half * half;
  double total = 0.0;
  auto full = [&](double a, double b) {
    if (!(b > a)) return;
    std::vector<double> cuts{a, b};
    for (double k : f.knots())
      if (k > a && k < b) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      total += kTwoPi * f.domain().integrate_linear(cuts[i], cuts[i + 1], f(cuts[i]),
                                                    f(cuts[i + 1]));
  };
  if (st < 1e-15) {
    // Centre at a pole: the ball is a polar cap.
    if (ct > 0)
      full(0.0, s);
    else
      full(kPi - s, kPi);
    return total / area;
  }
  full(0.0, s - theta_c);
  full(2.0 * kPi - s - theta_c, kPi);
  const double lo = std::abs(theta_c - s);
  const double hi = std::min(theta_c + s, 2.0 * kPi - theta_c - s);
  if (hi > lo) {
    const double m = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    // Half-angle of the latitude arc inside the cap, in product form:
    // sin^2(phi/2) = sin((s+d)/2) sin((s-d)/2) / (sin th sin theta_c), d = th - theta_c.
    auto integrand = [&](double th) {
      const double sth = std::sin(th);
      if (sth <= 0) return 0.0;
      const double dd = th - theta_c;
      const double q = std::clamp(
          std::sin(0.5 * (s + dd)) * std::sin(0.5 * (s - dd)) / (sth * st), 0.0, 1.0);
      return f(th) * 4.0 * std::asin(std::sqrt(q)) * sth;
    };
    std::vector<double> cuts{lo, hi};
    for (double k : f.knots())
      if (k > lo && k < hi) cuts.push_back(k);
    add_origin_cuts(cuts, lo, hi);
    // Mirror cuts toward the south pole.
    for (double step = kPi - hi; step > 0 && hi - step > lo; step *= 2.0) cuts.push_back(hi - step);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      if (cuts[i + 1] > cuts[i])
        total += quad::cosine_mapped(integrand, m, h, cuts[i], cuts[i + 1], mapped_rule());
  }
  return total / area;
}

}  // namespace maxlab
