// Acceptance run: one PASS/FAIL line per criterion, exit status 1 when any fails.
// Usage: maxlab_acceptance [criterion ...]   (no arguments runs all ten)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "maxlab/corpus.hpp"
#include "maxlab/io.hpp"
#include "maxlab/maxops.hpp"
#include "maxlab/sunrise.hpp"
#include "maxlab/verify.hpp"
#include "oracles.hpp"

using namespace maxlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

OperatorSpec make_op(OperatorKind k, double alpha = 0) {
  OperatorSpec op;
  op.kind = k;
  op.alpha = alpha;
  return op;
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
  return g;
}

void fail(Outcome& o, const std::string& why) {
  if (o.pass) o.detail = why;
  o.pass = false;
}

// 1. Tent: M(2) = 3 - sqrt(7) and f(a) = M(2) at the witness.
Outcome c1() {
  Outcome o;
  const auto t0 = Clock::now();
  const Profile f = tent();
  const auto r = maximize_at(make_op(OperatorKind::kUncenteredHL), f, 2.0);
  const double expect = 3.0 - std::sqrt(7.0);
  const auto w = std::get<IntervalWitness>(r.witness);
  const double secs = seconds_since(t0);
  if (std::abs(r.value - expect) > 1e-6) fail(o, fmt::format("M(2) = {:.12f}", r.value));
  if (std::abs(f(w.a) - r.value) > 1e-6) fail(o, fmt::format("f(a) = {:.12f}", f(w.a)));
  if (secs >= 1.0) fail(o, fmt::format("took {:.2f} s", secs));
  if (o.pass)
    o.detail = fmt::format("M(2) - (3 - sqrt 7) = {:.1e}, f(a) - M(2) = {:.1e}, {:.3f} s",
                           r.value - expect, f(w.a) - r.value, secs);
  return o;
}

// 2. Variation contractivity on the line.
Outcome c2() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto corpus = random_corpus(Domain::line(), 50, 20240601);
  const std::vector<OperatorSpec> ops{make_op(OperatorKind::kUncenteredHL),
                                      make_op(OperatorKind::kNonTangentialCube, 1.0 / 3.0),
                                      make_op(OperatorKind::kNonTangentialCube, 0.5),
                                      make_op(OperatorKind::kNonTangentialCube, 1.0)};
  double worst = 0;
  for (const auto& op : ops)
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto field = evaluate(op, corpus[i], make_grid(corpus[i], 256), 1);
      const double ratio = field_variation(field) / variation(corpus[i]);
      worst = std::max(worst, ratio);
      if (ratio > 1.0 + 1e-6)
        fail(o, fmt::format("{} alpha {} profile {}: ratio {:.9f}", operator_name(op.kind),
                            op.alpha, i, ratio));
    }
  const double secs = seconds_since(t0);
  if (secs >= 60) fail(o, fmt::format("took {:.1f} s", secs));
  if (o.pass) o.detail = fmt::format("200 fields, worst ratio {:.9f}, {:.1f} s", worst, secs);
  return o;
}

// 3. Lateral identities, monotonicity and derivative table.
Outcome c3() {
  Outcome o;
  const auto t0 = Clock::now();
  std::size_t nodes = 0, clamps = 0;
  for (const Domain& d : {Domain::line(), Domain::radial(2), Domain::radial(3)}) {
    const auto corpus = random_corpus(d, 25, 777);
    const int n = d.kind == DomainKind::kLine ? 400 : 120;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto field = evaluate(make_op(OperatorKind::kUncenteredHL), corpus[i],
                                  make_grid(corpus[i], n), 1);
      const auto dec = sunrise_decompose(corpus[i], field, 0.05);
      const auto id = check_sunrise_identities(dec);
      const auto table = lateral_derivative_table(dec);
      nodes += id.nodes;
      clamps += dec.clamp_count;
      if (!id.passed())
        fail(o, fmt::format("{} profile {}: identity fails at lateral node {}", d.name(), i,
                            id.first_bad));
      if (!table.monotonicity.empty())
        fail(o, fmt::format("{} profile {}: monotonicity ({}) at node {}", d.name(), i,
                            table.monotonicity[0].rule, table.monotonicity[0].node));
      if (!table.violations.empty())
        fail(o, fmt::format("{} profile {}: table rule {} at node {}", d.name(), i,
                            table.violations[0].rule, table.violations[0].node));
    }
  }
  const double secs = seconds_since(t0);
  if (secs >= 180) fail(o, fmt::format("took {:.1f} s", secs));
  if (o.pass)
    o.detail = fmt::format("75 profiles, {} lateral nodes, {} clamped, {:.1f} s", nodes, clamps, secs);
  return o;
}

// 4. No strict local maxima, and the designed failure for thin cubes.
Outcome c4() {
  Outcome o;
  const auto t0 = Clock::now();
  struct Scan {
    OperatorSpec op;
    Domain d;
    int count;
    int grid;
  };
  const std::vector<Scan> scans{
      {make_op(OperatorKind::kUncenteredHL), Domain::line(), 25, 400},
      {make_op(OperatorKind::kUncenteredHL), Domain::radial(2), 25, 100},
      {make_op(OperatorKind::kUncenteredHL), Domain::radial(3), 25, 100},
      {make_op(OperatorKind::kUncenteredHL), Domain::circle(), 25, 200},
      {make_op(OperatorKind::kSphereUncentered), Domain::polar(2), 25, 40},
      {make_op(OperatorKind::kNonTangentialCube, 1.0 / 3.0), Domain::line(), 25, 200},
      {make_op(OperatorKind::kNonTangentialCube, 0.5), Domain::line(), 25, 200},
      {make_op(OperatorKind::kNonTangentialCube, 1.0), Domain::line(), 25, 200},
      {make_op(OperatorKind::kNonTangentialCube, 1.0 / 3.0), Domain::radial(2), 25, 60},
      {make_op(OperatorKind::kNonTangentialCube, 0.5), Domain::radial(2), 25, 60},
      {make_op(OperatorKind::kNonTangentialCube, 1.0), Domain::radial(2), 25, 60},
      {make_op(OperatorKind::kHeatFlow, 0.0), Domain::line(), 25, 200},
      {make_op(OperatorKind::kHeatFlow, 1.0), Domain::line(), 25, 200},
  };
  std::size_t fields = 0;
  for (const auto& s : scans) {
    const auto corpus = random_corpus(s.d, s.count, 4242);
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const auto field = evaluate(s.op, corpus[i], make_grid(corpus[i], s.grid), 1);
      const auto rep = check_no_strict_local_max(field);
      ++fields;
      if (!rep.passed())
        fail(o, fmt::format("{} alpha {} on {} profile {}: local max at t = {:.6f}",
                            operator_name(s.op.kind), s.op.alpha, s.d.name(), i,
                            rep.violations[0].t));
    }
  }
  const Profile bumps = two_bump_line();
  const auto thin = evaluate(make_op(OperatorKind::kNonTangentialCube, 0.2), bumps,
                             make_grid(bumps, 800), 1);
  const auto demo = check_no_strict_local_max(thin);
  if (demo.passed()) fail(o, "two bumps, cube alpha 0.2: no strict local maximum found");
  if (o.pass)
    o.detail = fmt::format("{} fields clean; two-bump alpha 0.2 local max at t = {:.4f}; {:.1f} s",
                           fields, demo.violations[0].t, seconds_since(t0));
  return o;
}

// 5. Dyadic ancestry certificates.
Outcome c5() {
  Outcome o;
  std::vector<std::pair<Profile, CubeSpec>> cases;
  cases.emplace_back(tent(), CubeSpec{1, 0.0, 0.0, 1.0, 0.0});
  for (const auto& f : random_corpus(Domain::line(), 10, 55)) {
    const double a = f.breakpoints().front(), b = f.breakpoints().back();
    cases.emplace_back(f, CubeSpec{1, 0.5 * (a + b), 0.0, 0.5 * (b - a), 0.0});
  }
  double dev = 0;
  int max_k = 0;
  for (std::size_t i = 0; i < cases.size(); ++i) {
    const auto& [f, q] = cases[i];
    const auto at = dyadic_ancestry_certificate(f, q, 1.0 / 3.0, 1);
    const auto below = dyadic_ancestry_certificate(f, q, 0.32, 1);
    dev = std::max(dev, at.max_equal_deviation);
    max_k = std::max(max_k, at.k);
    if (!(at.averages.back() > at.averages.front()))
      fail(o, fmt::format("case {}: descendant not larger", i));
    if (at.max_equal_deviation > 1e-9)
      fail(o, fmt::format("case {}: intermediate deviation {:.2e}", i, at.max_equal_deviation));
    if (!at.all_overlap()) fail(o, fmt::format("case {}: overlap missing at alpha 1/3", i));
    bool any = false;
    for (bool b : below.overlaps) any = any || b;
    if (any) fail(o, fmt::format("case {}: overlap at alpha 0.32", i));
  }
  if (o.pass)
    o.detail = fmt::format("11 certificates, max level {}, max deviation {:.1e}", max_k, dev);
  return o;
}

// 6. Poisson closed form and the connecting neighbourhood of 0.
Outcome c6() {
  Outcome o;
  const Profile f = poisson_example_profile();
  Rng rng(66);
  double err = 0;
  for (int i = 0; i < 20; ++i) {
    const double y = rng.uniform(-3, 3), t = rng.uniform(0.05, 4);
    const double num = angular_kernel_average(f, KernelKind::kPoisson, {y, t});
    const double exact = std::log(((t + 2) * (t + 2) + y * y) / ((t + 1) * (t + 1) + y * y));
    err = std::max(err, std::abs(num - exact));
  }
  if (err > 1e-6) fail(o, fmt::format("convolution error {:.2e}", err));
  const auto op = make_op(OperatorKind::kPoissonFlow, 1.0);
  const double m0 = maximize_at(op, f, 0.0).value;
  if (std::abs(m0 - std::log(4.0)) > 1e-6) fail(o, fmt::format("M(0) = {:.9f}", m0));
  const auto field = evaluate(op, f, linspace(-1.0, 1.0, 101), 1);
  const auto flat = check_flatness(field, f);
  if (flat.list_b.empty()) fail(o, "flatness list B empty");
  // connecting nodes next to 0 where f' != 0
  std::size_t conn_sloped = 0;
  for (std::size_t i = 0; i < field.size(); ++i)
    if (std::abs(field.grid[i]) <= 0.2 && field.labels[i] == NodeLabel::kConnecting &&
        std::abs(f.slope_right(field.grid[i])) > 1e-3)
      ++conn_sloped;
  if (conn_sloped == 0) fail(o, "no sloped connecting node near 0");
  if (o.pass)
    o.detail = fmt::format("max error {:.1e}; M(0) - log 4 = {:.1e}; {} sloped connecting nodes "
                           "in [-0.2, 0.2]; list B {}",
                           err, m0 - std::log(4.0), conn_sloped, flat.list_b.size());
  return o;
}

// 7. Heat flow of the Gaussian.
Outcome c7() {
  Outcome o;
  const Profile f = gaussian_profile(1.0);
  // midpoints of the 0.01 knot cells, so every node sees a resolvable slope
  std::vector<double> grid;
  for (int i = 0; i < 500; ++i) grid.push_back(-4.995 + 0.02 * i);
  const auto f0 = evaluate(make_op(OperatorKind::kHeatFlow, 0.0), f, grid, 1);
  double err = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid[i];
    const double exact = x * x <= 2 ? std::exp(-x * x / 4) / std::sqrt(4 * std::numbers::pi)
                                    : std::exp(-0.5) / std::sqrt(2 * std::numbers::pi * x * x);
    err = std::max(err, std::abs(f0.values[i] - exact));
  }
  if (err > 1e-5) fail(o, fmt::format("closed-form error {:.2e}", err));
  const auto flat0 = check_flatness(f0, f);
  std::size_t inside = 0;
  for (const auto& n : flat0.list_a)
    if (n.t > 0 && n.t < std::sqrt(2.0)) ++inside;
  if (inside == 0) fail(o, "alpha 0: flatness does not fail on (0, sqrt 2)");
  const auto f1 = evaluate(make_op(OperatorKind::kHeatFlow, 1.0), f, grid, 1);
  const auto flat1 = check_flatness(f1, f);
  if (!flat1.list_a.empty())
    fail(o, fmt::format("alpha 1: connecting node with f' != 0 at t = {:.4f}", flat1.list_a[0].t));
  if (o.pass)
    o.detail = fmt::format("max error {:.1e}; alpha 0 has {} sloped connecting nodes in (0, sqrt 2); "
                           "alpha 1 has none",
                           err, inside);
  return o;
}

// 8. Continuity experiments f_j = f + g / j.
Outcome c8() {
  Outcome o;
  const auto t0 = Clock::now();
  struct Exp {
    OperatorSpec op;
    Profile f, g;
    int grid;
  };
  const Domain line = Domain::line(), rad = Domain::radial(2), circ = Domain::circle();
  const Profile lf = random_corpus(line, 1, 808)[0];
  const Profile lg = build_profile({-0.8, -0.3, 0.2}, {0.0, 0.6, 0.0}, line);
  const Profile rf = two_bump_radial(2);
  const Profile rg = build_profile({1.2, 1.6, 2.0}, {0.0, 0.5, 0.0}, rad);
  const Profile cf = random_corpus(circ, 1, 909)[0];
  const Profile cg = build_profile({1.0, 1.4, 1.8}, {0.0, 0.4, 0.0}, circ);
  const std::vector<Exp> exps{
      {make_op(OperatorKind::kUncenteredHL), lf, lg, 300},
      {make_op(OperatorKind::kNonTangentialCube, 0.5), lf, lg, 300},
      {make_op(OperatorKind::kHeatFlow, 1.0), lf, lg, 200},
      {make_op(OperatorKind::kUncenteredHL), rf, rg, 100},
      {make_op(OperatorKind::kNonTangentialCube, 0.5), rf, rg, 100},
      {make_op(OperatorKind::kHeatFlow, 1.0), rf, rg, 48},
      {make_op(OperatorKind::kUncenteredHL), cf, cg, 300},
  };
  std::string summary;
  for (const auto& e : exps) {
    std::vector<Profile> seq;
    for (int j = 1; j <= 16; ++j) seq.push_back(combine(1.0, e.f, 1.0 / j, e.g));
    const auto grid = experiment_grid(e.f, seq, e.grid);
    const auto rep = continuity_experiment(e.f, seq, e.op, 0.05, grid, 1);
    const std::string tag = fmt::format("{} alpha {} on {}", rep.op, rep.alpha, rep.domain);
    const double d1 = rep.rows.front().deriv_distance, d16 = rep.rows.back().deriv_distance;
    if (!(d16 * 4 <= d1)) fail(o, fmt::format("{}: distance {:.3e} -> {:.3e}", tag, d1, d16));
    if (!rep.distance_decreasing) fail(o, tag + ": distance trend");
    if (rep.max_additivity_residual > 1e-9)
      fail(o, fmt::format("{}: additivity residual {:.2e}", tag, rep.max_additivity_residual));
    if (!rep.lambda_decreasing) fail(o, tag + ": lambda not decreasing");
    if (!rep.branches_recorded) fail(o, tag + ": a row satisfies neither branch");
    summary += fmt::format(" {}:{:.0f}x", rep.domain, d1 / std::max(d16, 1e-300));
  }
  const double secs = seconds_since(t0);
  if (secs >= 600) fail(o, fmt::format("took {:.1f} s", secs));
  if (o.pass) o.detail = fmt::format("7 experiments, decay{}; {:.1f} s", summary, secs);
  return o;
}

// 9. evaluate() against brute force.
Outcome c9() {
  Outcome o;
  const auto t0 = Clock::now();
  const auto corpus = random_corpus(Domain::line(), 10, 999);
  Rng rng(1001);
  double worst = 0;
  for (int fam = 0; fam < 5; ++fam) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      const Profile& f = corpus[i];
      const oracle::PL pl(f);
      OperatorSpec op;
      const double alpha = std::round(rng.uniform(0.0, 2.0) * 100) / 100;
      switch (fam) {
        case 0: op = make_op(OperatorKind::kUncenteredHL); break;
        case 1: op = make_op(OperatorKind::kCenteredHL); break;
        case 2: op = make_op(OperatorKind::kNonTangentialCube, alpha); break;
        case 3: op = make_op(OperatorKind::kHeatFlow, alpha); break;
        default: op = make_op(OperatorKind::kPoissonFlow, alpha); break;
      }
      const auto grid = linspace(-3.0, 3.0, 7);
      const auto field = evaluate(op, f, grid, 1);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const double x = grid[k];
        double ref = 0;
        switch (fam) {
          case 0: ref = oracle::uncentered(pl, x); break;
          case 1: ref = oracle::centered(pl, x); break;
          case 2: ref = oracle::cube(pl, x, alpha); break;
          case 3: ref = oracle::flow(pl, x, alpha, true); break;
          default: ref = oracle::flow(pl, x, alpha, false); break;
        }
        const double diff = std::abs(field.values[k] - ref);
        worst = std::max(worst, diff);
        if (diff > 1e-5)
          fail(o, fmt::format("{} alpha {} profile {} x = {}: {:.9f} vs {:.9f}",
                              operator_name(op.kind), op.alpha, i, x, field.values[k], ref));
      }
    }
  }
  if (o.pass)
    o.detail = fmt::format("5 families x 10 pairs x 7 points, worst {:.1e}, {:.1f} s", worst,
                           seconds_since(t0));
  return o;
}

// 10. Reports do not depend on the thread count.
Outcome c10() {
  Outcome o;
  const Profile lf = random_corpus(Domain::line(), 1, 1234)[0];
  const Profile rf = random_corpus(Domain::radial(2), 1, 1234)[0];
  auto report = [&](int threads) {
    std::string s;
    for (const auto& [op, f, n] :
         {std::tuple{make_op(OperatorKind::kUncenteredHL), lf, 300},
          std::tuple{make_op(OperatorKind::kNonTangentialCube, 0.5), rf, 40},
          std::tuple{make_op(OperatorKind::kHeatFlow, 1.0), lf, 120}}) {
      const auto field = field_derivative(evaluate(op, f, make_grid(f, n), threads));
      s += io::dump(io::field_json(field));
      s += io::dump(io::local_max_json(check_no_strict_local_max(field)));
      const auto dec = sunrise_decompose(f, field, 0.05);
      s += io::dump(io::decomposition_json(dec, lateral_derivative_table(dec)));
      for (std::size_t i = 0; i < field.size(); ++i)
        s += fmt::format("{:a} {:a}\n", field.values[i], field.deriv[i]);
    }
    std::vector<Profile> seq;
    for (int j = 1; j <= 4; ++j) seq.push_back(combine(1.0 + 1.0 / j, lf, 0.0, lf));
    const auto rep = continuity_experiment(lf, seq, make_op(OperatorKind::kUncenteredHL), 0.05,
                                           experiment_grid(lf, seq, 200), threads);
    s += io::dump(io::convergence_json(rep));
    return s;
  };
  const std::string r1 = report(1), r4 = report(4), r16 = report(16);
  if (r1 != r4) fail(o, "1 vs 4 threads differ");
  if (r1 != r16) fail(o, "1 vs 16 threads differ");
  if (o.pass) o.detail = fmt::format("{} bytes identical across 1, 4, 16 threads", r1.size());
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  std::setvbuf(stdout, nullptr, _IONBF, 0);
  const std::vector<std::function<Outcome()>> all{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (int k = 1; k <= 10; ++k) {
    if (!pick.empty() && !pick.count(k)) continue;
    Outcome o;
    try {
      o = all[k - 1]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = fmt::format("exception: {}", e.what());
    }
    failed += !o.pass;
    std::printf("criterion %2d: %s  %s\n", k, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  }
  return failed == 0 ? 0 : 1;
}
