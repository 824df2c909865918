#include <algorithm>
#include <cmath>

#include <doctest.h>

#include "generators.hpp"
#include "maxlab/corpus.hpp"
#include "maxlab/maxops.hpp"
#include "maxlab/sunrise.hpp"

using namespace maxlab;

namespace {

SunriseDecomposition decompose(const Profile& f, int grid, double rho = 0.05) {
  const OperatorSpec op;
  return sunrise_decompose(f, evaluate(op, f, make_grid(f, grid), 1), rho);
}

}  // namespace

TEST_CASE("tent: two unbounded components with the plateau at infinity") {
  const auto dec = decompose(tent(), 60);
  REQUIRE(dec.components.size() == 2);
  CHECK(dec.components[0].a_infinite);
  CHECK(dec.components[1].b_infinite);
  CHECK(check_sunrise_identities(dec).passed());
  const auto table = lateral_derivative_table(dec);
  CHECK(table.violations.empty());
  CHECK(table.monotonicity.empty());
  CHECK(table.cells_checked > 0);
}

TEST_CASE("property: lateral identities and the derivative table on random profiles") {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    CAPTURE(seed);
    gen::Source s(seed);
    for (const Profile& f : {gen::line_profile(s), gen::radial_profile(s, 2), gen::circle_profile(s)}) {
      CAPTURE(f.domain().name());
      const auto dec = decompose(f, 60);
      const auto id = check_sunrise_identities(dec);
      CHECK(id.passed());
      CHECK(id.nodes == dec.t.size());
      for (std::size_t k = 0; k < dec.t.size(); ++k) {
        CHECK(dec.right[k] >= dec.f[k]);
        CHECK(dec.left[k] >= dec.f[k]);
        CHECK(std::max(dec.right[k], dec.left[k]) == dec.field[k]);
      }
      const auto table = lateral_derivative_table(dec);
      CHECK(table.violations.empty());
      CHECK(table.monotonicity.empty());
    }
  }
}

TEST_CASE("radial lateral nodes start after the cutoff") {
  const Profile f = two_bump_radial(2);
  const auto dec = decompose(f, 80, 0.3);
  REQUIRE(!dec.t.empty());
  CHECK(dec.t.front() > 0.3);
  CHECK(dec.has_rho);
  CHECK(check_sunrise_identities(dec).passed());
}

TEST_CASE("max_merge is the pointwise maximum") {
  gen::Source s(3);
  for (int k = 0; k < 10; ++k) {
    const Profile g = gen::line_profile(s), h = gen::line_profile(s);
    const Profile m = max_merge(g, h);
    for (int i = 0; i < 20; ++i) {
      const double x = s.real(-3.5, 3.5);
      CHECK(m(x) == doctest::Approx(std::max(g(x), h(x))).epsilon(1e-12));
    }
  }
}

TEST_CASE("region and class names") {
  CHECK(region_name(Region::kC) != region_name(Region::kDplus));
  CHECK(deriv_class_name(DerivClass::kDRminus) != deriv_class_name(DerivClass::kCRminus));
}
