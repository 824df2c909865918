#include "maxlab/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace maxlab {

namespace {

std::vector<double> spaced(Rng& rng, int gaps, double lo, double hi) {
  std::vector<double> g(static_cast<std::size_t>(gaps));
  double total = 0;
  for (auto& x : g) {
    x = rng.uniform(0.1, 1.0);
    total += x;
  }
  std::vector<double> t{lo};
  double acc = 0;
  for (int i = 0; i + 1 < gaps; ++i) {
    acc += g[static_cast<std::size_t>(i)];
    t.push_back(lo + (hi - lo) * acc / total);
  }
  t.push_back(hi);
  return t;
}

void smooth(std::vector<double>& v, bool cyclic, bool pin_ends) {
  const std::size_t n = v.size();
  std::vector<double> out(v);
  for (std::size_t i = 0; i < n; ++i) {
    const bool edge = i == 0 || i + 1 == n;
    if (edge && !cyclic) {
      if (pin_ends) continue;
      const double nb = i == 0 ? v[1] : v[n - 2];
      out[i] = (3 * v[i] + nb) / 4;
      continue;
    }
    const double l = v[(i + n - 1) % n], r = v[(i + 1) % n];
    out[i] = (l + 2 * v[i] + r) / 4;
  }
  v = out;
}

}  // namespace

Profile random_profile(const Domain& domain, Rng& rng) {
  std::vector<double> t, v;
  switch (domain.kind) {
    case DomainKind::kLine: {
      t = spaced(rng, rng.integer(4, 9), -2.5, 2.5);
      v.resize(t.size());
      for (std::size_t i = 1; i + 1 < v.size(); ++i) v[i] = rng.uniform();
      smooth(v, false, true);
      break;
    }
    case DomainKind::kRadialHalfLine: {
      const double r0 = rng.uniform(0.1, 0.5);
      t = spaced(rng, rng.integer(3, 8), r0, 3.0);
      v.resize(t.size());
      for (std::size_t i = 0; i + 1 < v.size(); ++i) v[i] = rng.uniform();
      smooth(v, false, false);
      v.back() = 0.0;
      break;
    }
    case DomainKind::kCircle: {
      const int k = rng.integer(5, 11);
      const double offset = rng.uniform(0.0, 2.0 * std::numbers::pi);
      auto u = spaced(rng, k, 0.0, 2.0 * std::numbers::pi);
      u.pop_back();
      for (double x : u) t.push_back(std::fmod(x + offset, 2.0 * std::numbers::pi));
      v.resize(t.size());
      for (auto& x : v) x = rng.uniform();
      smooth(v, true, false);
      break;
    }
    case DomainKind::kPolarInterval: {
      t = spaced(rng, rng.integer(3, 8), 0.05, std::numbers::pi - 0.05);
      v.resize(t.size());
      for (auto& x : v) x = rng.uniform();
      smooth(v, false, false);
      break;
    }
  }
  return build_profile(t, v, domain);
}

std::vector<Profile> random_corpus(const Domain& domain, int count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Profile> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(random_profile(domain, rng));
  return out;
}

Profile tent() { return build_profile({-1.0, 0.0, 1.0}, {0.0, 1.0, 0.0}, Domain::line()); }

Profile gaussian_profile(double t, double half_width, double h) {
  const int n = static_cast<int>(std::lround(2.0 * half_width / h));
  std::vector<double> xs, vs;
  for (int i = 0; i <= n; ++i) {
    const double x = -half_width + 2.0 * half_width * i / n;
    xs.push_back(x);
    vs.push_back((i == 0 || i == n) ? 0.0
                                    : std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * std::numbers::pi * t));
  }
  return build_profile(xs, vs, Domain::line());
}

Profile poisson_example_profile() {
  auto f = [](double x) { return std::log((4.0 + x * x) / (1.0 + x * x)); };
  auto fpp = [](double x) {
    const double a = 4.0 + x * x, b = 1.0 + x * x;
    return 2.0 * (4.0 - x * x) / (a * a) - 2.0 * (1.0 - x * x) / (b * b);
  };
  // Interpolation error h^2 |f''| / 8 held at 2e-7; the relative cap covers the inflection points.
  std::vector<double> pos;
  for (double x = 0.0;;) {
    const double h = std::min(std::sqrt(1.6e-6 / std::max(std::abs(fpp(x)), 1e-30)),
                              0.02 * (1.0 + x));
    x += h;
    if (x >= 1000.0) break;
    pos.push_back(x);
  }
  pos.push_back(1000.0);
  std::vector<double> xs, vs;
  for (auto it = pos.rbegin(); it != pos.rend(); ++it) {
    xs.push_back(-*it);
    vs.push_back(*it == 1000.0 ? 0.0 : f(*it));
  }
  xs.push_back(0.0);
  vs.push_back(f(0.0));
  for (double x : pos) {
    xs.push_back(x);
    vs.push_back(x == 1000.0 ? 0.0 : f(x));
  }
  return build_profile(xs, vs, Domain::line());
}

Profile two_bump_line(double center, double half_width, double height) {
  return build_profile({-center - half_width, -center, -center + half_width, center - half_width,
                        center, center + half_width},
                       {0.0, height, 0.0, 0.0, height, 0.0}, Domain::line());
}

Profile two_bump_radial(int d) {
  return build_profile({1.5, 2.0, 3.0, 4.0, 4.5}, {0.0, 1.0, 0.1, 1.0, 0.0}, Domain::radial(d));
}

}  // namespace maxlab
