#pragma once

// Small hand-rolled generators for the property tests. Each property runs a fixed number of
// seeded cases; a failing case prints its seed through doctest's CAPTURE.

#include <algorithm>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "maxlab/profile.hpp"

namespace gen {

class Source {
 public:
  explicit Source(std::uint64_t seed) : e_(seed) {}
  double real(double a, double b) { return std::uniform_real_distribution<double>(a, b)(e_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(e_); }
  bool coin(double p = 0.5) { return real(0, 1) < p; }

 private:
  std::mt19937_64 e_;
};

// Nonnegative line profile with n interior knots on [lo, hi]; sometimes with flat runs and
// tall spikes to stress ties.
inline maxlab::Profile line_profile(Source& s, int n_min = 2, int n_max = 10, double lo = -3,
                                    double hi = 3) {
  const int n = s.integer(n_min, n_max);
  std::vector<double> t{lo}, v{0.0};
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(s.real(lo, hi));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  double last = 0.5;
  for (double x : xs) {
    if (!(x > t.back() + 1e-3) || !(x < hi - 1e-3)) continue;
    t.push_back(x);
    if (s.coin(0.2))
      v.push_back(last);  // flat piece
    else if (s.coin(0.1))
      v.push_back(s.real(2, 5));  // spike
    else
      v.push_back(s.real(0, 1));
    last = v.back();
  }
  if (t.size() < 2) {
    t.push_back(0.5 * (lo + hi));
    v.push_back(1.0);
  }
  t.push_back(hi);
  v.push_back(0.0);
  return maxlab::build_profile(t, v, maxlab::Domain::line());
}

inline maxlab::Profile radial_profile(Source& s, int d) {
  const int n = s.integer(2, 7);
  std::vector<double> t, v;
  double x = s.real(0.1, 0.6);
  for (int i = 0; i < n; ++i) {
    t.push_back(x);
    v.push_back(s.real(0, 1));
    x += s.real(0.2, 0.8);
  }
  t.push_back(x);
  v.push_back(0.0);
  return maxlab::build_profile(t, v, maxlab::Domain::radial(d));
}

inline maxlab::Profile circle_profile(Source& s) {
  const int n = s.integer(3, 9);
  std::vector<double> t, v;
  for (int i = 0; i < n; ++i) t.push_back(s.real(0, 2 * std::numbers::pi));
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  for (std::size_t i = 0; i < t.size(); ++i) v.push_back(s.real(0, 1));
  return maxlab::build_profile(t, v, maxlab::Domain::circle());
}

}  // namespace gen
