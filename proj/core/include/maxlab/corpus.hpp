#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "maxlab/profile.hpp"

namespace maxlab {

// Seeded generator with a fixed mapping from 64-bit words to doubles, so corpora are identical
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }
  int integer(int lo, int hi) {  // inclusive
    return lo + static_cast<int>(uniform() * (hi - lo + 1) * (1.0 - 0x1.0p-53));
  }

 private:
  std::mt19937_64 engine_;
};

// Random nonnegative profile:
//   line    4-9 segments spanning [-2.5, 2.5], zero ends;
//   radial  left plateau from r0 in [0.1, 0.5] to 3, zero at the end;
//   circle  5-11 knots at random angles;
//   polar   4-9 knots inside [0.05, pi - 0.05].
// Knot gaps are drawn from [0.1, 1] and rescaled to the span; values are uniform in [0, 1]
// followed by one pass of (1, 2, 1)/4 smoothing.
Profile random_profile(const Domain& domain, Rng& rng);
std::vector<Profile> random_corpus(const Domain& domain, int count, std::uint64_t seed);

Profile tent();
// PL interpolant of the heat kernel phi_t on [-half_width, half_width] with spacing h.
Profile gaussian_profile(double t = 1.0, double half_width = 12.0, double h = 0.01);
// PL interpolant of log((4 + x^2) / (1 + x^2)) with spacing chosen from f'' so the interpolation
// error stays near 2e-7, out to |x| = 1000 where it is cut to zero.
Profile poisson_example_profile();
// Two narrow tent bumps of the given height and half-width centred at -center and +center.
Profile two_bump_line(double center = 5.0, double half_width = 0.1, double height = 1.0);
// Bumps at r = 2 and r = 4 with a valley at r = 3.
Profile two_bump_radial(int d);

}  // namespace maxlab
