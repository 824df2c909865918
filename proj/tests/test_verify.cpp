#include <cmath>
#include <vector>

#include <doctest.h>

#include "maxlab/corpus.hpp"
#include "maxlab/errors.hpp"
#include "maxlab/maxops.hpp"
#include "maxlab/verify.hpp"

using namespace maxlab;

TEST_CASE("dilated dyadic children meet their parent from alpha = 1/3 on") {
  const CubeSpec q{1, 0.0, 0.0, 1.0, 0.0};
  const auto kids = dyadic_children(q);
  REQUIRE(kids.size() == 2);
  CHECK(kids[0].c1 == doctest::Approx(-0.5));
  CHECK(kids[1].c1 == doctest::Approx(0.5));
  CHECK(kids[0].half_side == doctest::Approx(0.5));
  for (const auto& k : kids) {
    CHECK(dyadic_overlap(q, k, 1.0 / 3.0));
    CHECK(dyadic_overlap(q, k, 0.5));
    CHECK_FALSE(dyadic_overlap(q, k, 0.333));
  }
  const CubeSpec sq{2, 0.0, 0.0, 1.0, 0.0};
  CHECK(dyadic_children(sq).size() == 4);
}

TEST_CASE("tent certificate on [-1, 1]") {
  const auto c = dyadic_ancestry_certificate(tent(), CubeSpec{1, 0.0, 0.0, 1.0, 0.0}, 1.0 / 3.0, 1);
  CHECK(c.k == 2);
  REQUIRE(c.averages.size() == 3);
  CHECK(c.averages[0] == doctest::Approx(0.5));
  CHECK(c.averages[1] == doctest::Approx(0.5));
  CHECK(c.averages[2] == doctest::Approx(0.75));
  CHECK(c.all_overlap());
  CHECK(c.max_equal_deviation < 1e-12);
  const auto below = dyadic_ancestry_certificate(tent(), CubeSpec{1, 0.0, 0.0, 1.0, 0.0}, 0.32, 1);
  for (bool b : below.overlaps) CHECK_FALSE(b);
}

TEST_CASE("a constant cube has no larger descendant") {
  const Profile flat = build_profile({-3, -2, 2, 3}, {0, 1, 1, 0}, Domain::line());
  CHECK_THROWS_AS(dyadic_ancestry_certificate(flat, CubeSpec{1, 0.0, 0.0, 1.0, 0.0}, 0.5, 1),
                  InvalidInput);
}

TEST_CASE("flatness on the tent: the only connecting node is the peak") {
  OperatorSpec op;
  const Profile f = tent();
  const auto field = evaluate(op, f, make_grid(f, 80), 1);
  const auto rep = check_flatness(field, f);
  CHECK(rep.list_a.empty());
  CHECK(rep.nodes_checked > 0);
}

TEST_CASE("origin control") {
  const Profile f = build_profile({0.5, 1.5, 2.5}, {1.0, 0.4, 0.0}, Domain::radial(2));
  OperatorSpec op;
  const auto field = field_derivative(evaluate(op, f, make_grid(f, 80), 1));
  // the field is constant on the plateau near the origin
  const auto row = origin_control(f, field, 0.2, 3);
  CHECK(row.lhs == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(row.ratio == 0.0);
  CHECK_THROWS_AS(origin_control(f, field, 0.2, 2), InvalidInput);
  const auto sweep = origin_control_sweep(f, field, {0.4, 0.2, 0.1}, {3, 4});
  CHECK(sweep.rows.size() == 6);
  CHECK(sweep.lhs_nonincreasing_as_eta_shrinks);
}

TEST_CASE("decreasing trend") {
  CHECK(decreasing_trend({1.0, 0.5, 0.2, 0.1}, 1e-9));
  CHECK(decreasing_trend({1.0, 0.5, 0.6, 0.1}, 1e-9));
  CHECK_FALSE(decreasing_trend({1.0, 0.5, 0.6, 0.4, 0.5, 0.1}, 1e-9));
  CHECK_FALSE(decreasing_trend({1.0, 0.9, 0.8}, 1e-9));
  CHECK(decreasing_trend({1.0, 2.0, 0.0}, 1e-9));
  CHECK_FALSE(decreasing_trend({}, 1e-9));
  // a net decrease is enough with factor 1
  CHECK(decreasing_trend({0.03, 0.068, 0.05, 0.015}, 1e-9, 1, 1.0));
  CHECK_FALSE(decreasing_trend({0.03, 0.068, 0.05, 0.015}, 1e-9));
}

TEST_CASE("continuity: a constant sequence has zero distances") {
  const Profile f = tent();
  const std::vector<Profile> seq(3, f);
  OperatorSpec op;
  const auto rep = continuity_experiment(f, seq, op, 0.05, experiment_grid(f, seq, 60), 1);
  REQUIRE(rep.rows.size() == 3);
  for (const auto& r : rep.rows) {
    CHECK(r.deriv_distance == 0.0);
    CHECK(r.lateral_total == 0.0);
    CHECK(r.lambda == 0.0);
    CHECK(r.sup_field == 0.0);
  }
  CHECK(rep.distance_decreasing);
}

TEST_CASE("continuity: scaled tents converge at rate 1/j") {
  const Profile f = tent();
  std::vector<Profile> seq;
  for (int j = 1; j <= 8; ++j) seq.push_back(combine(1.0 + 1.0 / j, f, 0.0, f));
  OperatorSpec op;
  const auto rep = continuity_experiment(f, seq, op, 0.05, experiment_grid(f, seq, 80), 1);
  // M((1 + 1/j) f) = (1 + 1/j) Mf, so every distance is (1/j) times its j = 1 value
  const double d1 = rep.rows.front().deriv_distance;
  REQUIRE(d1 > 0);
  for (const auto& r : rep.rows) {
    CAPTURE(r.j);
    CHECK(r.deriv_distance == doctest::Approx(d1 / r.j).epsilon(1e-6));
  }
  CHECK(rep.distance_decreasing);
  CHECK(rep.max_additivity_residual < 1e-9);
}

TEST_CASE("bound suite on the tent") {
  const Profile f = tent();
  OperatorSpec op;
  const auto field = evaluate(op, f, make_grid(f, 120), 1);
  const auto b = bound_suite(f, field);
  CHECK(b.f_norm == doctest::Approx(2.0));
  // Mf rises to 1 and falls back, so the variation is 2 as well
  CHECK(b.field_norm == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(b.ratio <= 1.0 + 1e-9);
  CHECK_FALSE(b.degenerate);
  CHECK(b.weak_type > 0);
  CHECK(field_variation(field) == doctest::Approx(b.field_norm));
}
