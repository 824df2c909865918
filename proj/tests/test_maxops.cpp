#include <algorithm>
#include <cmath>
#include <numbers>

#include <doctest.h>

#include "generators.hpp"
#include "maxlab/corpus.hpp"
#include "maxlab/errors.hpp"
#include "maxlab/maxops.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

OperatorSpec op_of(OperatorKind k, double alpha = 0) {
  OperatorSpec op;
  op.kind = k;
  op.alpha = alpha;
  return op;
}

Profile shifted(const Profile& f, double tau) {
  std::vector<double> t = f.breakpoints();
  for (double& x : t) x += tau;
  return build_profile(t, f.values(), f.domain());
}

}  // namespace

TEST_CASE("operator names round-trip") {
  for (auto k : {OperatorKind::kUncenteredHL, OperatorKind::kCenteredHL,
                 OperatorKind::kNonTangentialCube, OperatorKind::kHeatFlow,
                 OperatorKind::kPoissonFlow, OperatorKind::kSphereUncentered})
    CHECK(parse_operator(operator_name(k)) == k);
  CHECK_THROWS_AS(parse_operator("fractional"), InvalidInput);
}

TEST_CASE("tent at x = 2: value 3 - sqrt 7 with f(a) equal to it") {
  const Profile f = tent();
  const auto r = maximize_at(op_of(OperatorKind::kUncenteredHL), f, 2.0);
  const auto w = std::get<IntervalWitness>(r.witness);
  CHECK(r.value == doctest::Approx(3 - std::sqrt(7.0)).epsilon(1e-9));
  CHECK(f(w.a) == doctest::Approx(r.value).epsilon(1e-7));
  CHECK(w.b == doctest::Approx(2.0));
  // stationarity of the left endpoint: f(a) equals the average over [a, x]
  CHECK(w.a == doctest::Approx(2 - std::sqrt(7.0)).epsilon(1e-7));
}

TEST_CASE("unsupported combinations and bad inputs") {
  const Profile c = build_profile({0.0, 2.0}, {1.0, 0.0}, Domain::circle());
  CHECK_THROWS_AS(evaluate(op_of(OperatorKind::kHeatFlow, 1), c, {0.5}, 1), Unsupported);
  const Profile neg = build_profile({-1, 0, 1}, {0, -1, 0}, Domain::line());
  CHECK_THROWS_AS(evaluate(op_of(OperatorKind::kUncenteredHL), neg, {0.0}, 1), InvalidInput);
  CHECK_THROWS_AS(evaluate(op_of(OperatorKind::kUncenteredHL), tent(), {0.5, 0.1}, 1),
                  InvalidInput);
  CHECK_THROWS_AS(evaluate(op_of(OperatorKind::kNonTangentialCube, -1), tent(), {0.5}, 1),
                  InvalidInput);
}

TEST_CASE("brute-force agreement on small random profiles") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    CAPTURE(seed);
    gen::Source s(seed);
    const Profile f = gen::line_profile(s, 2, 6);
    const oracle::PL pl(f);
    const double x = s.real(-3.5, 3.5);
    CAPTURE(x);
    CHECK(maximize_at(op_of(OperatorKind::kUncenteredHL), f, x).value ==
          doctest::Approx(oracle::uncentered(pl, x)).epsilon(1e-6));
    CHECK(maximize_at(op_of(OperatorKind::kCenteredHL), f, x).value ==
          doctest::Approx(oracle::centered(pl, x)).epsilon(1e-6));
    CHECK(maximize_at(op_of(OperatorKind::kNonTangentialCube, 0.5), f, x).value ==
          doctest::Approx(oracle::cube(pl, x, 0.5)).epsilon(1e-6));
    CHECK(maximize_at(op_of(OperatorKind::kHeatFlow, 1.0), f, x).value ==
          doctest::Approx(oracle::flow(pl, x, 1.0, true)).epsilon(1e-6));
  }
}

TEST_CASE("property: homogeneity, translation and ordering on the line") {
  for (std::uint64_t seed = 10; seed < 16; ++seed) {
    CAPTURE(seed);
    gen::Source s(seed);
    const Profile f = gen::line_profile(s, 2, 6);
    const double c = s.real(0.2, 5), tau = s.real(-2, 2);
    const Profile cf = combine(c, f, 0, f), tf = shifted(f, tau);
    const std::vector<double> xs{-2.5, -1.0, 0.3, 1.7};
    std::vector<double> txs;
    for (double x : xs) txs.push_back(x + tau);
    const auto unc = evaluate(op_of(OperatorKind::kUncenteredHL), f, xs, 1);
    const auto unc_c = evaluate(op_of(OperatorKind::kUncenteredHL), cf, xs, 1);
    const auto unc_t = evaluate(op_of(OperatorKind::kUncenteredHL), tf, txs, 1);
    const auto cen = evaluate(op_of(OperatorKind::kCenteredHL), f, xs, 1);
    const auto thin = evaluate(op_of(OperatorKind::kNonTangentialCube, 0.25), f, xs, 1);
    const auto wide = evaluate(op_of(OperatorKind::kNonTangentialCube, 1.0), f, xs, 1);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      CAPTURE(xs[i]);
      CHECK(unc_c.values[i] == doctest::Approx(c * unc.values[i]).epsilon(1e-8));
      CHECK(unc_t.values[i] == doctest::Approx(unc.values[i]).epsilon(1e-8));
      CHECK(cen.values[i] <= unc.values[i] + 1e-9);
      CHECK(thin.values[i] <= wide.values[i] + 1e-9);
      CHECK(wide.values[i] <= unc.values[i] + 1e-9);  // alpha <= 1 keeps x inside the interval
      CHECK(unc.values[i] >= f(xs[i]) - 1e-12);
    }
  }
}

TEST_CASE("constant profile on the circle is its own maximal function") {
  const Profile c = build_profile({0.0, 2.0, 4.0}, {0.6, 0.6, 0.6}, Domain::circle());
  const auto field = evaluate(op_of(OperatorKind::kSphereUncentered), c, make_grid(c, 32), 1);
  for (double v : field.values) CHECK(v == doctest::Approx(0.6).epsilon(1e-12));
  for (auto l : field.labels) CHECK(l == NodeLabel::kConnecting);
}

TEST_CASE("heat flow without aperture on the Gaussian") {
  const Profile g = gaussian_profile(1.0);
  const auto op = op_of(OperatorKind::kHeatFlow, 0.0);
  for (double x : {0.3, 1.0, 2.5, 4.0}) {
    CAPTURE(x);
    const double exact = x * x <= 2 ? std::exp(-x * x / 4) / std::sqrt(4 * std::numbers::pi)
                                    : std::exp(-0.5) / std::sqrt(2 * std::numbers::pi * x * x);
    CHECK(maximize_at(op, g, x).value == doctest::Approx(exact).epsilon(1e-5));
  }
}

TEST_CASE("grid construction and region classification") {
  const Profile f = tent();
  const auto g = make_grid(f, 50);
  CHECK(std::is_sorted(g.begin(), g.end()));
  for (double k : f.breakpoints()) CHECK(std::find(g.begin(), g.end(), k) != g.end());
  const auto field = evaluate(op_of(OperatorKind::kUncenteredHL), f, g, 1);
  const auto runs = classify_regions(field, field.gap_tol);
  REQUIRE(runs.size() == 2);
  CHECK(runs[0].a_unbounded);
  CHECK(runs[1].b_unbounded);
  // run ends sit within one grid cell of the peak
  CHECK(std::abs(runs[0].b) < 0.1);
  CHECK(std::abs(runs[1].a) < 0.1);
}

TEST_CASE("evaluation does not depend on the thread count") {
  const Profile f = random_corpus(Domain::radial(2), 1, 3)[0];
  const auto g = make_grid(f, 24);
  const auto op = op_of(OperatorKind::kNonTangentialCube, 0.5);
  const auto a = evaluate(op, f, g, 1), b = evaluate(op, f, g, 3);
  CHECK(a.values == b.values);
  CHECK(a.gap == b.gap);
}

TEST_CASE("field derivatives follow the witness") {
  const Profile f = tent();
  const auto field = field_derivative(evaluate(op_of(OperatorKind::kUncenteredHL), f, {-0.5, 0.0, 1.5}, 1));
  CHECK(field.deriv_method[1] == DerivMethod::kConnecting);
  CHECK(field.deriv_method[2] == DerivMethod::kWitness);
  // on the right of the tent, (f(b) - f(a)) / (b - a) with b = x
  const auto w = std::get<IntervalWitness>(field.witnesses[2]);
  CHECK(field.deriv[2] == doctest::Approx((f(w.b) - f(w.a)) / (w.b - w.a)));
  CHECK(field.deriv[2] < 0);
}
