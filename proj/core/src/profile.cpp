#include "maxlab/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "maxlab/errors.hpp"
#include "maxlab/quadrature.hpp"

namespace maxlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double polar_linear(int d, double a, double b, double va, double vb, bool derivative) {
  if (a == b) return 0.0;
  const double slope = (vb - va) / (b - a);
  auto g = [=](double t) {
    const double lin = va + slope * (t - a);
    if (derivative) return lin * (d - 1) * std::pow(std::sin(t), d - 2) * std::cos(t);
    return lin * std::pow(std::sin(t), d - 1);
  };
  return quad::adaptive(g, a, b, 1e-10);
}

}  // namespace

Domain Domain::radial(int d) {
  if (d < 2) throw InvalidInput(fmt::format("radial domain needs dim >= 2, got {}", d));
  return {DomainKind::kRadialHalfLine, d};
}

Domain Domain::polar(int d) {
  if (d < 2) throw InvalidInput(fmt::format("polar domain needs dim >= 2, got {}", d));
  return {DomainKind::kPolarInterval, d};
}

double Domain::weight(double t) const {
  switch (kind) {
    case DomainKind::kRadialHalfLine:
      return std::pow(t, dim - 1);
    case DomainKind::kPolarInterval:
      return std::pow(std::sin(t), dim - 1);
    default:
      return 1.0;
  }
}

double Domain::weight_derivative(double t) const {
  switch (kind) {
    case DomainKind::kRadialHalfLine:
      return (dim - 1) * std::pow(t, dim - 2);
    case DomainKind::kPolarInterval:
      return (dim - 1) * std::pow(std::sin(t), dim - 2) * std::cos(t);
    default:
      return 0.0;
  }
}

double Domain::integrate_linear(double a, double b, double va, double vb) const {
  if (a == b) return 0.0;
  switch (kind) {
    case DomainKind::kRadialHalfLine: {
      // Polynomial of degree dim: the rule below is exact.
      const double slope = (vb - va) / (b - a);
      const auto& rule = quad::gauss_rule(std::max(2, dim / 2 + 1));
      return quad::gauss_legendre(
          [&](double t) { return (va + slope * (t - a)) * std::pow(t, dim - 1); }, a, b, rule);
    }
    case DomainKind::kPolarInterval:
      return polar_linear(dim, a, b, va, vb, false);
    default:
      return 0.5 * (b - a) * (va + vb);
  }
}

double Domain::integrate_linear_dw(double a, double b, double va, double vb) const {
  if (a == b) return 0.0;
  switch (kind) {
    case DomainKind::kRadialHalfLine: {
      const double slope = (vb - va) / (b - a);
      const auto& rule = quad::gauss_rule(std::max(2, dim / 2 + 1));
      return quad::gauss_legendre(
          [&](double t) {
            return (va + slope * (t - a)) * (dim - 1) * std::pow(t, dim - 2);
          },
          a, b, rule);
    }
    case DomainKind::kPolarInterval:
      return polar_linear(dim, a, b, va, vb, true);
    default:
      return 0.0;
  }
}

double Domain::surface_constant() const { return weighted() ? sphere_area(dim - 1) : 1.0; }

std::string Domain::name() const {
  switch (kind) {
    case DomainKind::kLine:
      return "line";
    case DomainKind::kCircle:
      return "circle";
    case DomainKind::kRadialHalfLine:
      return fmt::format("radial:{}", dim);
    case DomainKind::kPolarInterval:
      return fmt::format("polar:{}", dim);
  }
  return "?";
}

double sphere_area(int n) {
  const double k = 0.5 * (n + 1);
  return 2.0 * std::pow(std::numbers::pi, k) / std::tgamma(k);
}

Domain parse_domain(const std::string& text) {
  if (text == "line") return Domain::line();
  if (text == "circle") return Domain::circle();
  auto colon = text.find(':');
  if (colon != std::string::npos) {
    const std::string head = text.substr(0, colon);
    int d = 0;
    try {
      std::size_t used = 0;
      d = std::stoi(text.substr(colon + 1), &used);
      if (used + colon + 1 != text.size()) d = 0;
    } catch (const std::exception&) {
      d = 0;
    }
    if (head == "radial" && d >= 2) return Domain::radial(d);
    if (head == "polar" && d >= 2) return Domain::polar(d);
  }
  throw InvalidInput(fmt::format("unknown domain '{}' (expected line, circle, radial:D, polar:D)",
                                 text));
}

// ---------------------------------------------------------------------------------------------
// Profile

Profile make_profile_unchecked(Domain domain, std::vector<double> t, std::vector<double> v,
                               bool windowed) {
  Profile p;
  p.domain_ = domain;
  p.t_ = std::move(t);
  p.v_ = std::move(v);
  p.windowed_ = windowed;
  p.finalize();
  return p;
}

Profile Profile::window(Domain domain, std::vector<double> t, std::vector<double> v) {
  if (t.size() != v.size() || t.size() < 2) throw InvalidInput("window: need >= 2 samples");
  for (std::size_t i = 1; i < t.size(); ++i)
    if (!(t[i] > t[i - 1])) throw InvalidInput("window: breakpoints must increase strictly");
  return make_profile_unchecked(domain, std::move(t), std::move(v), true);
}

void Profile::finalize() {
  kt_ = t_;
  kv_ = v_;
  if (!windowed_) {
    switch (domain_.kind) {
      case DomainKind::kRadialHalfLine:
        if (kt_.front() > 0) {
          kt_.insert(kt_.begin(), 0.0);
          kv_.insert(kv_.begin(), kv_.front());
        }
        break;
      case DomainKind::kPolarInterval:
        if (kt_.front() > 0) {
          kt_.insert(kt_.begin(), 0.0);
          kv_.insert(kv_.begin(), kv_.front());
        }
        if (kt_.back() < std::numbers::pi) {
          kt_.push_back(std::numbers::pi);
          kv_.push_back(kv_.back());
        }
        break;
      case DomainKind::kCircle:
        kt_.push_back(t_.front() + kTwoPi);
        kv_.push_back(v_.front());
        break;
      case DomainKind::kLine:
        break;
    }
  }
  cum_.assign(kt_.size(), 0.0);
  for (std::size_t k = 1; k < kt_.size(); ++k)
    cum_[k] = cum_[k - 1] + 0.5 * (kt_[k] - kt_[k - 1]) * (kv_[k] + kv_[k - 1]);
  nonnegative_ = std::all_of(v_.begin(), v_.end(), [](double x) { return x >= 0; });
}

double Profile::support_lower() const {
  if (!windowed_ && domain_.kind == DomainKind::kLine) return t_.front();
  return kt_.front();
}

double Profile::support_upper() const {
  if (!windowed_ && (domain_.kind == DomainKind::kLine ||
                     domain_.kind == DomainKind::kRadialHalfLine))
    return t_.back();
  return kt_.back();
}

std::size_t Profile::segment_of(double t) const {
  auto it = std::upper_bound(kt_.begin(), kt_.end(), t);
  std::size_t k = static_cast<std::size_t>(it - kt_.begin());
  if (k == 0) return 0;
  k -= 1;
  return std::min(k, kt_.size() - 2);
}

double Profile::eval_inside(double t) const {
  const std::size_t k = segment_of(t);
  const double h = kt_[k + 1] - kt_[k];
  const double s = (t - kt_[k]) / h;
  if (s <= 0) return kv_[k];
  if (s >= 1) return kv_[k + 1];
  return kv_[k] + s * (kv_[k + 1] - kv_[k]);
}

double Profile::wrap(double t) const {
  const double base = kt_.front();
  double u = t - kTwoPi * std::floor((t - base) / kTwoPi);
  if (u >= base + kTwoPi) u -= kTwoPi;
  if (u < base) u = base;
  return u;
}

double Profile::operator()(double t) const {
  if (windowed_) {
    if (t < kt_.front() || t > kt_.back())
      throw InvalidInput(fmt::format("profile window [{}, {}] does not contain {}", kt_.front(),
                                     kt_.back(), t));
    return eval_inside(t);
  }
  switch (domain_.kind) {
    case DomainKind::kLine:
      if (t <= kt_.front() || t >= kt_.back()) return 0.0;
      return eval_inside(t);
    case DomainKind::kRadialHalfLine:
      if (t >= kt_.back()) return 0.0;
      return eval_inside(std::max(t, 0.0));
    case DomainKind::kCircle:
      return eval_inside(wrap(t));
    case DomainKind::kPolarInterval:
      return eval_inside(std::clamp(t, 0.0, std::numbers::pi));
  }
  return 0.0;
}

double Profile::slope_right(double t) const {
  if (!windowed_) {
    if (domain_.kind == DomainKind::kCircle) t = wrap(t);
    if (t < kt_.front() || t >= kt_.back()) return 0.0;
  }
  auto it = std::upper_bound(kt_.begin(), kt_.end(), t);
  if (it == kt_.begin() || it == kt_.end()) return 0.0;
  const std::size_t k = static_cast<std::size_t>(it - kt_.begin()) - 1;
  return (kv_[k + 1] - kv_[k]) / (kt_[k + 1] - kt_[k]);
}

double Profile::slope_left(double t) const {
  if (!windowed_) {
    if (domain_.kind == DomainKind::kCircle) {
      t = wrap(t);
      if (t == kt_.front()) t += kTwoPi;
    }
    if (t <= kt_.front() || t > kt_.back()) return 0.0;
  }
  auto it = std::lower_bound(kt_.begin(), kt_.end(), t);
  if (it == kt_.begin() || it == kt_.end()) return 0.0;
  const std::size_t k = static_cast<std::size_t>(it - kt_.begin()) - 1;
  return (kv_[k + 1] - kv_[k]) / (kt_[k + 1] - kt_[k]);
}

double Profile::primitive_inside(double a, double b) const {
  // a <= b, both inside the knot range.
  if (a == b) return 0.0;
  const std::size_t ka = segment_of(a);
  const std::size_t kb = segment_of(b);
  const double fa = eval_inside(a);
  const double fb = eval_inside(b);
  if (ka == kb) return 0.5 * (b - a) * (fa + fb);
  double s = 0.5 * (kt_[ka + 1] - a) * (fa + kv_[ka + 1]);
  s += cum_[kb] - cum_[ka + 1];
  s += 0.5 * (b - kt_[kb]) * (kv_[kb] + fb);
  return s;
}

double Profile::integral(double a, double b) const {
  if (a > b) throw InvalidInput(fmt::format("integral: a = {} > b = {}", a, b));
  if (a == b) return 0.0;
  if (windowed_) {
    if (a < kt_.front() || b > kt_.back())
      throw InvalidInput("integral: interval leaves the profile window");
    return primitive_inside(a, b);
  }
  switch (domain_.kind) {
    case DomainKind::kLine: {
      const double lo = std::max(a, kt_.front());
      const double hi = std::min(b, kt_.back());
      return lo < hi ? primitive_inside(lo, hi) : 0.0;
    }
    case DomainKind::kRadialHalfLine: {
      if (a < 0) throw InvalidInput("integral: radial profile queried at negative radius");
      const double hi = std::min(b, kt_.back());
      return a < hi ? primitive_inside(a, hi) : 0.0;
    }
    case DomainKind::kPolarInterval:
      if (a < 0 || b > std::numbers::pi) throw InvalidInput("integral: outside [0, pi]");
      return primitive_inside(a, b);
    case DomainKind::kCircle: {
      const double period = cum_.back();
      const double a0 = wrap(a);
      double len = b - a;
      const double turns = std::floor(len / kTwoPi);
      len -= turns * kTwoPi;
      double s = turns * period;
      const double end = a0 + len;
      const double top = kt_.back();
      if (end <= top) {
        s += primitive_inside(a0, end);
      } else {
        s += primitive_inside(a0, top) + primitive_inside(kt_.front(), end - kTwoPi);
      }
      return s;
    }
  }
  return 0.0;
}

double Profile::max_value() const { return *std::max_element(kv_.begin(), kv_.end()); }
double Profile::min_value() const { return *std::min_element(kv_.begin(), kv_.end()); }
double Profile::max_abs() const {
  double m = 0;
  for (double x : kv_) m = std::max(m, std::abs(x));
  return m;
}

Profile build_profile(std::vector<Sample> samples, Domain domain) {
  if (samples.size() < 2)
    throw InvalidInput(fmt::format("build_profile: need >= 2 samples, got {}", samples.size()));
  for (const auto& s : samples) {
    if (!std::isfinite(s.t) || !std::isfinite(s.v))
      throw InvalidInput(fmt::format("build_profile: non-finite sample ({}, {})", s.t, s.v));
  }
  switch (domain.kind) {
    case DomainKind::kRadialHalfLine:
      for (const auto& s : samples)
        if (s.t < 0)
          throw InvalidInput(fmt::format("build_profile: breakpoint {} outside [0, inf)", s.t));
      break;
    case DomainKind::kPolarInterval:
      for (const auto& s : samples)
        if (s.t < 0 || s.t > std::numbers::pi)
          throw InvalidInput(fmt::format("build_profile: breakpoint {} outside [0, pi]", s.t));
      break;
    case DomainKind::kCircle:
      for (auto& s : samples) {
        s.t = s.t - kTwoPi * std::floor(s.t / kTwoPi);
        if (s.t >= kTwoPi) s.t = 0.0;
      }
      break;
    case DomainKind::kLine:
      break;
  }
  std::sort(samples.begin(), samples.end(),
            [](const Sample& x, const Sample& y) { return x.t < y.t; });
  for (std::size_t i = 1; i < samples.size(); ++i)
    if (samples[i].t == samples[i - 1].t)
      throw InvalidInput(fmt::format("build_profile: duplicate breakpoint {}", samples[i].t));
  if (domain.kind == DomainKind::kLine && (samples.front().v != 0 || samples.back().v != 0))
    throw InvalidInput(fmt::format(
        "build_profile: line profile needs zero end values, got {} and {}", samples.front().v,
        samples.back().v));
  if (domain.kind == DomainKind::kRadialHalfLine && samples.back().v != 0)
    throw InvalidInput(fmt::format(
        "build_profile: radial profile needs zero value at its last breakpoint, got {}",
        samples.back().v));
  std::vector<double> t, v;
  t.reserve(samples.size());
  v.reserve(samples.size());
  for (const auto& s : samples) {
    t.push_back(s.t);
    v.push_back(s.v);
  }
  return make_profile_unchecked(domain, std::move(t), std::move(v), false);
}

Profile build_profile(const std::vector<double>& t, const std::vector<double>& v,
                      Domain domain) {
  if (t.size() != v.size()) throw InvalidInput("build_profile: t and v sizes differ");
  std::vector<Sample> s(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) s[i] = {t[i], v[i]};
  return build_profile(std::move(s), domain);
}

// ---------------------------------------------------------------------------------------------
// Norms and distances

double weighted_derivative_l1(const Profile& f) {
  const auto& kt = f.knots();
  const auto& kv = f.knot_values();
  const Domain& d = f.domain();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < kt.size(); ++k) {
    const double slope = (kv[k + 1] - kv[k]) / (kt[k + 1] - kt[k]);
    if (slope != 0) s += std::abs(slope) * d.weight_integral(kt[k], kt[k + 1]);
  }
  return s * d.surface_constant();
}

double weighted_derivative_l1(const Profile& f, double a, double b) {
  const auto& kt = f.knots();
  const auto& kv = f.knot_values();
  const Domain& d = f.domain();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < kt.size(); ++k) {
    const double lo = std::max(a, kt[k]), hi = std::min(b, kt[k + 1]);
    if (!(hi > lo)) continue;
    const double slope = (kv[k + 1] - kv[k]) / (kt[k + 1] - kt[k]);
    if (slope != 0) s += std::abs(slope) * d.weight_integral(lo, hi);
  }
  return s * d.surface_constant();
}

namespace {

// Integral of |linear| against the domain weight, split at the zero crossing.
double abs_linear(const Domain& d, double a, double b, double va, double vb) {
  if (a == b) return 0.0;
  if ((va >= 0 && vb >= 0) || (va <= 0 && vb <= 0))
    return std::abs(d.integrate_linear(a, b, va, vb));
  const double c = a + (b - a) * va / (va - vb);
  return std::abs(d.integrate_linear(a, c, va, 0.0)) + std::abs(d.integrate_linear(c, b, 0.0, vb));
}

}  // namespace

double weighted_l1(const Profile& f) {
  const auto& kt = f.knots();
  const auto& kv = f.knot_values();
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < kt.size(); ++k)
    s += abs_linear(f.domain(), kt[k], kt[k + 1], kv[k], kv[k + 1]);
  return s * f.domain().surface_constant();
}

double variation(std::span<const double> values) {
  double s = 0.0;
  for (std::size_t i = 1; i < values.size(); ++i) s += std::abs(values[i] - values[i - 1]);
  return s;
}

double variation(const Profile& f) { return variation(f.knot_values()); }

double variation(const Profile& f, double a, double b) {
  if (a > b) throw InvalidInput("variation: a > b");
  std::vector<double> vals{f(a)};
  for (std::size_t k = 0; k < f.knots().size(); ++k) {
    const double t = f.knots()[k];
    if (t > a && t < b) vals.push_back(f.knot_values()[k]);
  }
  vals.push_back(f(b));
  return variation(vals);
}

Profile abs_reduce(const Profile& f) {
  const auto& t = f.breakpoints();
  const auto& v = f.values();
  std::vector<double> nt, nv;
  auto push_crossing = [&](double a, double b, double va, double vb) {
    if ((va < 0 && vb > 0) || (va > 0 && vb < 0)) {
      nt.push_back(a + (b - a) * va / (va - vb));
      nv.push_back(0.0);
    }
  };
  for (std::size_t i = 0; i < t.size(); ++i) {
    nt.push_back(t[i]);
    nv.push_back(std::abs(v[i]));
    if (i + 1 < t.size()) push_crossing(t[i], t[i + 1], v[i], v[i + 1]);
  }
  if (f.domain().periodic() && !f.windowed()) {
    const double a = t.back();
    const double b = t.front() + kTwoPi;
    if ((v.back() < 0 && v.front() > 0) || (v.back() > 0 && v.front() < 0)) {
      double c = a + (b - a) * v.back() / (v.back() - v.front());
      if (c >= kTwoPi) {
        c -= kTwoPi;
        nt.insert(nt.begin(), c);
        nv.insert(nv.begin(), 0.0);
      } else {
        nt.push_back(c);
        nv.push_back(0.0);
      }
    }
  }
  return make_profile_unchecked(f.domain(), std::move(nt), std::move(nv), f.windowed());
}

std::vector<double> common_refinement(const Profile& f, const Profile& g) {
  if (!(f.domain() == g.domain()))
    throw InvalidInput(fmt::format("domain mismatch: {} vs {}", f.domain().name(),
                                   g.domain().name()));
  std::vector<double> r;
  const bool windowed = f.windowed() || g.windowed();
  auto add = [&](const Profile& p) {
    if (f.domain().periodic() && !windowed)
      r.insert(r.end(), p.breakpoints().begin(), p.breakpoints().end());
    else
      r.insert(r.end(), p.knots().begin(), p.knots().end());
  };
  add(f);
  add(g);
  if (!windowed) {
    if (f.domain().kind == DomainKind::kCircle) {
      r.push_back(0.0);
      r.push_back(kTwoPi);
    } else if (f.domain().kind == DomainKind::kRadialHalfLine) {
      r.push_back(0.0);
    } else if (f.domain().kind == DomainKind::kPolarInterval) {
      r.push_back(0.0);
      r.push_back(std::numbers::pi);
    }
  } else {
    const double lo = std::max(f.knots().front(), g.knots().front());
    const double hi = std::min(f.knots().back(), g.knots().back());
    std::erase_if(r, [&](double x) { return x < lo || x > hi; });
  }
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

namespace {

Profile rebuild_like(const Profile& f, const Profile& g, std::vector<double> t,
                     std::vector<double> v) {
  const bool windowed = f.windowed() || g.windowed();
  if (!windowed && f.domain().periodic()) {
    // Drop the duplicate 2pi endpoint; the closing segment is implied.
    if (t.size() > 1 && t.back() >= kTwoPi) {
      t.pop_back();
      v.pop_back();
    }
  }
  return make_profile_unchecked(f.domain(), std::move(t), std::move(v), windowed);
}

}  // namespace

Profile combine(double a, const Profile& f, double b, const Profile& g) {
  auto r = common_refinement(f, g);
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = a * f(r[i]) + b * g(r[i]);
  return rebuild_like(f, g, std::move(r), std::move(v));
}

Profile pointwise_max(const Profile& f, const Profile& g) {
  auto r = common_refinement(f, g);
  std::vector<double> t, v;
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double fi = f(r[i]), gi = g(r[i]);
    t.push_back(r[i]);
    v.push_back(std::max(fi, gi));
    if (i + 1 < r.size()) {
      const double d0 = fi - gi;
      const double d1 = f(r[i + 1]) - g(r[i + 1]);
      if ((d0 < 0 && d1 > 0) || (d0 > 0 && d1 < 0)) {
        const double c = r[i] + (r[i + 1] - r[i]) * d0 / (d0 - d1);
        if (c > r[i] && c < r[i + 1]) {
          t.push_back(c);
          v.push_back(std::max(f(c), g(c)));
        }
      }
    }
  }
  return rebuild_like(f, g, std::move(t), std::move(v));
}

W11Distance w11_distance(const Profile& f, const Profile& g, double delta) {
  const auto r = common_refinement(f, g);
  const Domain& d = f.domain();
  W11Distance out;
  std::vector<double> diff(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) diff[i] = f(r[i]) - g(r[i]);
  for (std::size_t i = 0; i + 1 < r.size(); ++i) {
    const double a = r[i], b = r[i + 1];
    out.l1 += abs_linear(d, a, b, diff[i], diff[i + 1]);
    const double slope = (diff[i + 1] - diff[i]) / (b - a);
    if (slope != 0) out.deriv_l1 += std::abs(slope) * d.weight_integral(a, b);
  }
  out.l1 *= d.surface_constant();
  out.deriv_l1 *= d.surface_constant();
  // PL difference: the sup over {t >= delta} is attained at a knot or at delta itself.
  if (delta >= r.front() && delta <= r.back())
    out.sup_tail = std::abs(f(delta) - g(delta));
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i] >= delta) out.sup_tail = std::max(out.sup_tail, std::abs(diff[i]));
  return out;
}

BoundaryDecay boundary_decay(const Profile& f) {
  if (f.domain().kind != DomainKind::kRadialHalfLine)
    throw InvalidInput("boundary_decay: radial half-line profile required");
  const auto& t = f.breakpoints();
  const auto& v = f.values();
  return {f.domain().weight(t.front()) * v.front(), f.domain().weight(t.back()) * v.back()};
}

std::vector<double> sample(const Profile& f, std::span<const double> at) {
  std::vector<double> out(at.size());
  for (std::size_t i = 0; i < at.size(); ++i) out[i] = f(at[i]);
  return out;
}

}  // namespace maxlab
