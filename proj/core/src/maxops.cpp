#include "maxlab/maxops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <tuple>

#include <fmt/format.h>

#include "maxlab/errors.hpp"
#include "maxlab/parallel.hpp"
#include "maxlab/search.hpp"

namespace maxlab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct Candidate {
  double value = kNegInf;
  Witness witness;
  double scale = 0;
  double offset = 0;
};

// Keeps the candidate list and applies the tie-break: largest value, then (within a relative
// 1e-14) smallest scale, then smallest centre offset.
class Pool {
 public:
  void add(double value, Witness w, double scale, double offset) {
    if (!(value > kNegInf)) return;
    items_.push_back({value, std::move(w), scale, offset});
  }
  Candidate best() const {
    double top = kNegInf;
    for (const auto& c : items_) top = std::max(top, c.value);
    const double tie = 1e-14 * std::max(1.0, std::abs(top));
    const Candidate* pick = nullptr;
    for (const auto& c : items_) {
      if (c.value < top - tie) continue;
      if (!pick || c.scale < pick->scale ||
          (c.scale == pick->scale && c.offset < pick->offset))
        pick = &c;
    }
    return *pick;
  }

 private:
  std::vector<Candidate> items_;
};

std::vector<int> counts_for(const SearchConfig& cfg, std::vector<int> defaults) {
  if (cfg.coarse_grid.empty()) return defaults;
  if (cfg.coarse_grid.size() == 1) return std::vector<int>(defaults.size(), cfg.coarse_grid[0]);
  if (cfg.coarse_grid.size() == defaults.size()) return cfg.coarse_grid;
  return defaults;
}

// Mass of f in the measure of the underlying space (line, circle, R^d radial, S^2 polar).
double space_l1(const Profile& f) { return weighted_l1(f); }

double reflect_polar(double c) {
  // Polar angle of the point at signed meridian coordinate c.
  double u = std::fmod(c, kTwoPi);
  if (u < 0) u += kTwoPi;
  return u <= kPi ? u : kTwoPi - u;
}

double cap_with(double cap, const SearchConfig& cfg) {
  return cfg.scale_cap > 0 ? std::min(cap, cfg.scale_cap) : cap;
}

// Two-parameter search over [a, b] containing x given an average function.
template <class Avg>
void interval_family(Pool& pool, Avg&& avg, double x, double a_lo, double b_hi, double max_len,
                     const SearchConfig& cfg, const std::vector<double>& anchors = {}) {
  search::Box box{{a_lo, x}, {x, b_hi}};
  if (!(box.hi[0] > box.lo[0]) && !(box.hi[1] > box.lo[1])) return;
  auto obj = [&](const std::vector<double>& p) {
    if (p[1] - p[0] > max_len * (1 + 1e-14)) return kNegInf;
    return avg(p[0], p[1]);
  };
  auto counts = counts_for(cfg, {24, 24});
  // A collapsed side (x at the support edge) leaves a one-parameter search.
  for (std::size_t k = 0; k < 2; ++k)
    if (!(box.hi[k] > box.lo[k])) counts[k] = 1;
  auto res = search::maximize(obj, box, counts, cfg.restarts, cfg.refine_tol);
  if (!anchors.empty()) {
    // For PL averages an optimal endpoint is a knot, x, or a stationary point on a piece next to
    // one, so knot pairs seed every basin the tensor scan can step over.
    std::vector<double> as{box.lo[0], x}, bs{x, box.hi[1]};
    for (double k : anchors) {
      if (k > box.lo[0] && k < x) as.push_back(k);
      if (k > x && k < box.hi[1]) bs.push_back(k);
    }
    std::vector<search::Point> seeds;
    for (double a : as)
      for (double b : bs) {
        const double v = obj({a, b});
        if (v > kNegInf) seeds.push_back({{a, b}, v});
      }
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const search::Point& p, const search::Point& q) { return p.value > q.value; });
    if (seeds.size() > std::size_t(std::max(1, cfg.restarts))) seeds.resize(std::max(1, cfg.restarts));
    std::vector<double> step{(box.hi[0] - box.lo[0]) / 23, (box.hi[1] - box.lo[1]) / 23};
    for (auto& sd : seeds) res.push_back(search::coordinate_ascent(obj, box, sd, step, cfg.refine_tol));
  }
  for (const auto& p : res)
    pool.add(p.value, IntervalWitness{p.x[0], p.x[1]}, 0.5 * (p.x[1] - p.x[0]),
             std::abs(0.5 * (p.x[0] + p.x[1]) - x));
}

// One-parameter search of g on [lo, hi]; adds every refined candidate through `emit`.
template <class G, class Emit>
void line_family(G&& g, double lo, double hi, const SearchConfig& cfg, Emit&& emit) {
  if (!(hi > lo)) return;
  search::Box box{{lo}, {hi}};
  auto obj = [&](const std::vector<double>& p) { return g(p[0]); };
  auto res = search::maximize(obj, box, counts_for(cfg, {48}), cfg.restarts, cfg.refine_tol);
  for (const auto& p : res) emit(p.x[0], p.value);
}

void centered_line(Pool& pool, const Profile& f, double x, const SearchConfig& cfg,
                   double& cap_out) {
  const double cap = std::max({x - f.support_lower(), f.support_upper() - x, 0.0});
  cap_out = cap;
  line_family([&](double r) { return interval_average(f, x - r, x + r); }, 0.0, cap, cfg,
              [&](double r, double v) { pool.add(v, IntervalWitness{x - r, x + r}, r, 0.0); });
}

void cube_line(Pool& pool, const Profile& f, double x, double alpha, const SearchConfig& cfg,
               double& cap_out) {
  const double l1 = space_l1(f);
  const double reach = std::max({std::abs(x - f.support_lower()), std::abs(f.support_upper() - x),
                                 1e-300});
  const double lower = std::max(f(x), l1 / (2.0 * reach));
  const double rcap = cap_with(lower > 0 ? std::min(reach, l1 / (2.0 * lower)) : reach, cfg);
  cap_out = rcap;
  auto avg = [&](double y, double r) { return interval_average(f, y - r, y + r); };
  auto emit_edge = [&](double sign) {
    return [&, sign](double r, double v) {
      const double y = x + sign * alpha * r;
      pool.add(v, CubeSpec{1, y, 0.0, r, 0.0}, r, std::abs(y - x));
    };
  };
  for (double sign : {-1.0, 1.0}) {
    line_family([&](double r) { return avg(x + sign * alpha * r, r); }, 0.0, rcap, cfg,
                emit_edge(sign));
    if (alpha == 0) break;
  }
  if (alpha > 0) {
    const double over = std::max(alpha - 1.0, 0.0);
    search::Box box{{x - (1 + alpha) * rcap, x - over * rcap}, {x + over * rcap, x + (1 + alpha) * rcap}};
    auto obj = [&](const std::vector<double>& p) {
      const double a = p[0], b = p[1];
      if (b < a) return kNegInf;
      const double r = 0.5 * (b - a), y = 0.5 * (a + b);
      if (r > rcap * (1 + 1e-14)) return kNegInf;
      if (std::abs(x - y) > alpha * r * (1 + 1e-14) + 1e-300) return kNegInf;
      return interval_average(f, a, b);
    };
    auto res = search::maximize(obj, box, counts_for(cfg, {24, 24}), cfg.restarts, cfg.refine_tol);
    for (const auto& p : res) {
      const double r = 0.5 * (p.x[1] - p.x[0]), y = 0.5 * (p.x[0] + p.x[1]);
      pool.add(p.value, CubeSpec{1, y, 0.0, r, 0.0}, r, std::abs(y - x));
    }
  }
}

void cube_plane(Pool& pool, const Profile& f, double x, double alpha, const SearchConfig& cfg,
                double& cap_out) {
  const double l1 = space_l1(f);
  const double reach = std::abs(x) + f.support_upper();
  const double lower = std::max(f(x), l1 / (4.0 * reach * reach));
  const double hcap = cap_with(lower > 0 ? std::min(reach, 0.5 * std::sqrt(l1 / lower)) : reach, cfg);
  cap_out = hcap;
  auto spec_of = [&](const std::vector<double>& p) {
    const double h = p[0], ph = p[3];
    const double c = std::cos(ph), s = std::sin(ph);
    const double u = alpha * h * p[1], v = alpha * h * p[2];
    return CubeSpec{2, x - (c * u - s * v), -(s * u + c * v), h, ph};
  };
  search::Box box{{0.0, -1.0, -1.0, 0.0}, {hcap, 1.0, 1.0, kPi / 4}};
  if (alpha == 0) box.lo[1] = box.hi[1] = box.lo[2] = box.hi[2] = 0.0;
  auto obj = [&](const std::vector<double>& p) { return cube_average(f, spec_of(p)); };
  std::vector<int> counts = counts_for(cfg, {12, 5, 5, 3});
  if (alpha == 0) counts[1] = counts[2] = 1;
  auto res = search::maximize(obj, box, counts, std::max(2, cfg.restarts / 2), cfg.refine_tol);
  if (alpha > 0) {
    // Optima often put x on the dilate boundary with the centre on the axis through x: an edge
    // midpoint (phi = 0) or a corner (phi = pi/4). The 5 x 5 offset scan steps over these
    // narrow ridges, so search them in h alone and refine the best in all four parameters.
    std::vector<search::Point> seeds;
    for (const auto& [u, v, ph] : {std::tuple{1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0},
                                   {1.0, -1.0, kPi / 4}, {-1.0, 1.0, kPi / 4}})
      line_family([&](double h) { return obj({h, u, v, ph}); }, 0.0, hcap, cfg,
                  [&](double h, double val) { seeds.push_back({{h, u, v, ph}, val}); });
    std::stable_sort(seeds.begin(), seeds.end(),
                     [](const search::Point& a, const search::Point& b) { return a.value > b.value; });
    if (seeds.size() > std::size_t(std::max(1, cfg.restarts))) seeds.resize(std::max(1, cfg.restarts));
    std::vector<double> step;
    for (std::size_t k = 0; k < 4; ++k) step.push_back((box.hi[k] - box.lo[k]) / 11);
    for (auto& sd : seeds) res.push_back(search::coordinate_ascent(obj, box, sd, step, cfg.refine_tol));
  }
  for (const auto& p : res) {
    auto q = spec_of(p.x);
    pool.add(p.value, q, q.half_side, std::hypot(q.c1 - x, q.c2));
  }
}

void flow_family(Pool& pool, const Profile& f, double x, const OperatorSpec& op,
                 double& cap_out) {
  const bool heat = op.kind == OperatorKind::kHeatFlow;
  const KernelKind kernel = heat ? KernelKind::kHeat : KernelKind::kPoisson;
  const bool radial = f.domain().kind == DomainKind::kRadialHalfLine;
  const int d = radial ? f.domain().dim : 1;
  const double alpha = op.alpha;
  const auto& cfg = op.search;
  const double width = std::max(f.support_upper() - (radial ? 0.0 : f.support_lower()), 1e-12);
  const double l1 = space_l1(f);
  auto u = [&](double y, double t) {
    return angular_kernel_average(f, kernel, ParabolicPoint{radial ? std::abs(y) : y, t});
  };
  auto gap_of = [&](double t) { return heat ? std::sqrt(t) : t; };
  double lower = f(x);
  const double t_ref = heat ? width * width : width;
  lower = std::max(lower, u(x, t_ref));
  double tcap = cfg.time_cap;
  if (lower > 0) {
    const double bound =
        heat ? std::pow(l1 / lower, 2.0 / d) / (4.0 * kPi)
             : std::pow(std::tgamma(0.5 * (d + 1)) / std::pow(kPi, 0.5 * (d + 1)) * l1 / lower,
                        1.0 / d);
    tcap = std::min(tcap, bound);
  }
  cap_out = tcap;
  const double tmin = heat ? 1e-12 * width * width : 1e-6 * width;
  if (!(tcap > tmin)) return;
  const double llo = std::log(tmin), lhi = std::log(tcap);
  auto add = [&](double y, double t, double v) {
    pool.add(v, ParabolicPoint{y, t}, t, std::abs(y - x));
  };
  for (double sign : {-1.0, 1.0}) {
    line_family(
        [&](double lt) {
          const double t = std::exp(lt);
          return u(x + sign * alpha * gap_of(t), t);
        },
        llo, lhi, cfg,
        [&](double lt, double v) {
          const double t = std::exp(lt);
          add(x + sign * alpha * gap_of(t), t, v);
        });
    if (alpha == 0) break;
  }
  if (alpha > 0) {
    search::Box box{{llo, -1.0}, {lhi, 1.0}};
    auto obj = [&](const std::vector<double>& p) {
      const double t = std::exp(p[0]);
      return u(x + p[1] * alpha * gap_of(t), t);
    };
    auto res = search::maximize(obj, box, counts_for(cfg, {24, 9}), std::max(2, cfg.restarts / 2),
                                cfg.refine_tol);
    for (const auto& p : res) {
      const double t = std::exp(p.x[0]);
      add(x + p.x[1] * alpha * gap_of(t), t, p.value);
    }
  }
}

}  // namespace

std::string operator_name(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::kUncenteredHL:
      return "uncentered";
    case OperatorKind::kCenteredHL:
      return "centered";
    case OperatorKind::kNonTangentialCube:
      return "cube";
    case OperatorKind::kHeatFlow:
      return "heat";
    case OperatorKind::kPoissonFlow:
      return "poisson";
    case OperatorKind::kSphereUncentered:
      return "sphere";
  }
  return "?";
}

OperatorKind parse_operator(const std::string& name) {
  for (auto k : {OperatorKind::kUncenteredHL, OperatorKind::kCenteredHL,
                 OperatorKind::kNonTangentialCube, OperatorKind::kHeatFlow,
                 OperatorKind::kPoissonFlow, OperatorKind::kSphereUncentered})
    if (operator_name(k) == name) return k;
  throw InvalidInput(fmt::format(
      "unknown operator '{}' (expected uncentered, centered, cube, heat, poisson, sphere)", name));
}

void check_supported(const OperatorSpec& op, const Domain& domain) {
  if (op.alpha < 0 || !std::isfinite(op.alpha))
    throw InvalidInput(fmt::format("aperture alpha must be >= 0, got {}", op.alpha));
  const auto k = domain.kind;
  bool ok = false;
  switch (op.kind) {
    case OperatorKind::kUncenteredHL:
      ok = k != DomainKind::kPolarInterval || domain.dim == 2;
      break;
    case OperatorKind::kCenteredHL:
      ok = k == DomainKind::kLine;
      break;
    case OperatorKind::kNonTangentialCube:
      ok = k == DomainKind::kLine || (k == DomainKind::kRadialHalfLine && domain.dim == 2);
      break;
    case OperatorKind::kHeatFlow:
    case OperatorKind::kPoissonFlow:
      ok = k == DomainKind::kLine || k == DomainKind::kRadialHalfLine;
      break;
    case OperatorKind::kSphereUncentered:
      ok = k == DomainKind::kCircle || (k == DomainKind::kPolarInterval && domain.dim == 2);
      break;
  }
  if (!ok)
    throw Unsupported(fmt::format("operator '{}' is not supported on domain '{}'",
                                  operator_name(op.kind), domain.name()));
}

double witness_scale(const Witness& w) {
  if (auto* iw = std::get_if<IntervalWitness>(&w)) return 0.5 * (iw->b - iw->a);
  if (auto* cw = std::get_if<CubeSpec>(&w)) return cw->half_side;
  return std::get<ParabolicPoint>(w).t;
}

double witness_average(const OperatorSpec& op, const Profile& f, const Witness& w) {
  const auto kind = f.domain().kind;
  if (auto* iw = std::get_if<IntervalWitness>(&w)) {
    const double c = 0.5 * (iw->a + iw->b), s = 0.5 * (iw->b - iw->a);
    switch (kind) {
      case DomainKind::kRadialHalfLine:
        return ball_average_radial(f, std::abs(c), s);
      case DomainKind::kPolarInterval:
        return geodesic_ball_average(f, reflect_polar(c), s);
      default:
        return interval_average(f, iw->a, iw->b);
    }
  }
  if (auto* cw = std::get_if<CubeSpec>(&w)) {
    if (cw->half_side == 0) return f(cw->dim == 1 ? cw->c1 : std::hypot(cw->c1, cw->c2));
    return cube_average(f, *cw);
  }
  const auto& p = std::get<ParabolicPoint>(w);
  const double y = kind == DomainKind::kRadialHalfLine ? std::abs(p.y) : p.y;
  if (p.t == 0) return f(y);
  return angular_kernel_average(
      f, op.kind == OperatorKind::kHeatFlow ? KernelKind::kHeat : KernelKind::kPoisson, {y, p.t});
}

NodeResult maximize_at(const OperatorSpec& op, const Profile& f, double x) {
  const auto& cfg = op.search;
  const Domain& dom = f.domain();
  Pool pool;
  double cap = 0;
  const double fx = f(x);
  switch (op.kind) {
    case OperatorKind::kUncenteredHL:
    case OperatorKind::kSphereUncentered:
      if (dom.kind == DomainKind::kLine) {
        const double lo = std::min(f.support_lower(), x), hi = std::max(f.support_upper(), x);
        cap = 0.5 * (hi - lo);
        interval_family(pool, [&](double a, double b) { return interval_average(f, a, b); }, x,
                        lo, hi, hi - lo, cfg, f.knots());
      } else if (dom.kind == DomainKind::kCircle) {
        cap = kPi;
        std::vector<double> anchors;
        for (double k : f.knots())
          for (int m = -2; m <= 2; ++m) anchors.push_back(k + m * kTwoPi);
        interval_family(pool, [&](double a, double b) { return interval_average(f, a, b); }, x,
                        x - kTwoPi, x + kTwoPi, kTwoPi, cfg, anchors);
      } else if (dom.kind == DomainKind::kRadialHalfLine) {
        const int d = dom.dim;
        const double l1 = space_l1(f);
        const double reach = std::max(x, f.support_upper());
        const double vol_reach = sphere_area(d - 1) * std::pow(reach, d) / d;
        const double lower = std::max(fx, l1 / vol_reach);
        double scap = reach;
        if (lower > 0) scap = std::min(reach, std::pow(l1 * d / (sphere_area(d - 1) * lower), 1.0 / d));
        scap = cap_with(scap, cfg);
        cap = scap;
        interval_family(
            pool,
            [&](double a, double b) {
              return ball_average_radial(f, std::abs(0.5 * (a + b)), 0.5 * (b - a));
            },
            x, x - 2.0 * scap, x + 2.0 * scap, 2.0 * scap, cfg);
      } else {
        cap = kPi;
        interval_family(
            pool,
            [&](double a, double b) {
              return geodesic_ball_average(f, reflect_polar(0.5 * (a + b)), 0.5 * (b - a));
            },
            x, x - kTwoPi, x + kTwoPi, kTwoPi, cfg);
      }
      break;
    case OperatorKind::kCenteredHL:
      centered_line(pool, f, x, cfg, cap);
      break;
    case OperatorKind::kNonTangentialCube:
      if (dom.kind == DomainKind::kLine)
        cube_line(pool, f, x, op.alpha, cfg, cap);
      else
        cube_plane(pool, f, x, op.alpha, cfg, cap);
      break;
    case OperatorKind::kHeatFlow:
    case OperatorKind::kPoissonFlow:
      flow_family(pool, f, x, op, cap);
      break;
  }
  // The degenerate witness (radius zero) is always admissible.
  Witness degenerate;
  switch (op.kind) {
    case OperatorKind::kNonTangentialCube:
      degenerate = CubeSpec{dom.kind == DomainKind::kLine ? 1 : 2, x, 0.0, 0.0, 0.0};
      break;
    case OperatorKind::kHeatFlow:
    case OperatorKind::kPoissonFlow:
      degenerate = ParabolicPoint{x, 0.0};
      break;
    default:
      degenerate = IntervalWitness{x, x};
  }
  pool.add(fx, degenerate, 0.0, 0.0);
  const auto best = pool.best();
  return {std::max(best.value, fx), best.witness, cap};
}

double default_gap_tol(const Profile& f) { return 1e-8 + 1e-6 * f.max_value(); }

std::vector<double> make_grid(const Profile& f, int n, bool include_knots) {
  if (n < 2) throw InvalidInput("make_grid: need at least 2 nodes");
  std::vector<double> g;
  std::vector<double> knots;
  const auto& dom = f.domain();
  double h = 0;
  switch (dom.kind) {
    case DomainKind::kLine: {
      const double lo = f.support_lower(), hi = f.support_upper(), w = hi - lo;
      const double a = lo - 0.5 * w, b = hi + 0.5 * w;
      h = (b - a) / (n - 1);
      for (int i = 0; i < n; ++i) g.push_back(a + h * i);
      knots = f.knots();
      break;
    }
    case DomainKind::kRadialHalfLine: {
      const double b = 1.5 * f.support_upper();
      h = b / n;
      for (int i = 1; i <= n; ++i) g.push_back(h * i);
      for (double k : f.knots())
        if (k > 0) knots.push_back(k);
      break;
    }
    case DomainKind::kCircle:
      h = kTwoPi / n;
      for (int i = 0; i < n; ++i) g.push_back(h * i);
      knots = f.breakpoints();
      break;
    case DomainKind::kPolarInterval:
      h = kPi / n;
      for (int i = 0; i < n; ++i) g.push_back(h * (i + 0.5));
      for (double k : f.knots())
        if (k > 0 && k < kPi) knots.push_back(k);
      break;
  }
  if (include_knots && !knots.empty()) {
    std::sort(knots.begin(), knots.end());
    std::erase_if(g, [&](double x) {
      auto it = std::lower_bound(knots.begin(), knots.end(), x);
      if (it != knots.end() && *it - x < 1e-3 * h) return true;
      if (it != knots.begin() && x - *(it - 1) < 1e-3 * h) return true;
      return false;
    });
    g.insert(g.end(), knots.begin(), knots.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
  }
  return g;
}

MaximalField evaluate(const OperatorSpec& op, const Profile& f, std::vector<double> grid,
                      int threads) {
  check_supported(op, f.domain());
  if (grid.empty()) throw InvalidInput("evaluate: empty grid");
  if (!f.nonnegative())
    throw InvalidInput("evaluate: profile has negative values; apply abs_reduce first");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidInput("evaluate: grid must increase strictly");
  MaximalField field;
  field.op = op;
  field.f = f;
  field.grid = std::move(grid);
  const std::size_t n = field.grid.size();
  field.values.resize(n);
  field.witnesses.resize(n);
  field.scale_caps.resize(n);
  field.gap.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const double x = field.grid[i];
    auto r = maximize_at(op, f, x);
    field.values[i] = r.value;
    field.witnesses[i] = r.witness;
    field.scale_caps[i] = r.scale_cap;
    field.gap[i] = r.value - f(x);
  });
  field.deriv.assign(n, 0.0);
  field.deriv_method.assign(n, DerivMethod::kNone);
  relabel(field, default_gap_tol(f));
  return field;
}

void relabel(MaximalField& field, double tol) {
  field.gap_tol = tol;
  field.labels.resize(field.size());
  for (std::size_t i = 0; i < field.size(); ++i)
    field.labels[i] = field.gap[i] > tol ? NodeLabel::kDisconnecting : NodeLabel::kConnecting;
}

namespace {

double finite_difference(const MaximalField& fl, std::size_t i) {
  const auto& x = fl.grid;
  const auto& v = fl.values;
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (i == 0) return (v[1] - v[0]) / (x[1] - x[0]);
  if (i + 1 == n) return (v[n - 1] - v[n - 2]) / (x[n - 1] - x[n - 2]);
  const double h0 = x[i] - x[i - 1], h1 = x[i + 1] - x[i];
  return (h0 * h0 * v[i + 1] - h1 * h1 * v[i - 1] + (h1 * h1 - h0 * h0) * v[i]) /
         (h0 * h1 * (h0 + h1));
}

}  // namespace

MaximalField field_derivative(MaximalField field) {
  const auto& f = field.f;
  const auto kind = f.domain().kind;
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double x = field.grid[i];
    if (field.labels[i] == NodeLabel::kConnecting) {
      field.deriv[i] = 0.5 * (f.slope_left(x) + f.slope_right(x));
      field.deriv_method[i] = DerivMethod::kConnecting;
      continue;
    }
    const auto& w = field.witnesses[i];
    const auto* iw = std::get_if<IntervalWitness>(&w);
    if (iw && iw->b > iw->a &&
        (kind == DomainKind::kLine || kind == DomainKind::kCircle)) {
      field.deriv[i] = (f(iw->b) - f(iw->a)) / (iw->b - iw->a);
      field.deriv_method[i] = DerivMethod::kWitness;
    } else if (iw && iw->b > iw->a && kind == DomainKind::kRadialHalfLine) {
      field.deriv[i] = ball_gradient_radial(f, 0.5 * (iw->a + iw->b), 0.5 * (iw->b - iw->a));
      field.deriv_method[i] = DerivMethod::kWitness;
    } else if (field.size() >= 2) {
      field.deriv[i] = finite_difference(field, i);
      field.deriv_method[i] = DerivMethod::kFiniteDifference;
    } else {
      field.deriv[i] = 0.0;
      field.deriv_method[i] = DerivMethod::kUnavailable;
    }
  }
  return field;
}

std::vector<DisconnectingInterval> classify_regions(const MaximalField& field, double tol,
                                                    bool refine) {
  const std::size_t n = field.size();
  const auto& g = field.grid;
  const auto kind = field.f.domain().kind;
  std::vector<bool> dis(n);
  for (std::size_t i = 0; i < n; ++i) dis[i] = field.gap[i] > tol;
  std::vector<DisconnectingInterval> runs;
  for (std::size_t i = 0; i < n;) {
    if (!dis[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && dis[j + 1]) ++j;
    runs.push_back({0, 0, i, j, false, false});
    i = j + 1;
  }
  if (runs.empty()) return runs;
  const double span = g.back() - g.front();
  auto boundary = [&](double tc, double td) {
    if (!refine) return tc;
    const double eps = field.op.search.refine_tol * std::max(1.0, span);
    for (int it = 0; it < 200 && std::abs(td - tc) > eps; ++it) {
      const double mid = 0.5 * (tc + td);
      const double gap = maximize_at(field.op, field.f, mid).value - field.f(mid);
      (gap > tol ? td : tc) = mid;
    }
    return 0.5 * (tc + td);
  };
  const bool circle = kind == DomainKind::kCircle;
  if (circle && runs.size() == 1 && runs[0].first == 0 && runs[0].last == n - 1) {
    runs[0].a = 0;
    runs[0].b = kTwoPi;
    runs[0].a_unbounded = runs[0].b_unbounded = true;
    return runs;
  }
  if (circle && runs.size() > 1 && runs.front().first == 0 && runs.back().last == n - 1) {
    runs.front().first = runs.back().first;
    runs.pop_back();
  }
  for (auto& r : runs) {
    const bool wraps = r.first > r.last;
    // Left end.
    if (r.first == 0 && !circle) {
      if (kind == DomainKind::kLine) {
        r.a_unbounded = true;
        r.a = g.front();
      } else {
        r.a = 0.0;
      }
    } else {
      const double td = g[r.first] - (wraps ? kTwoPi : 0.0);
      const double tc = r.first == 0 ? g[n - 1] - kTwoPi : g[r.first - 1] - (wraps ? kTwoPi : 0.0);
      r.a = boundary(tc, td);
    }
    // Right end.
    if (r.last == n - 1 && !circle) {
      if (kind == DomainKind::kPolarInterval) {
        r.b = kPi;
      } else {
        r.b_unbounded = true;
        r.b = g.back();
      }
    } else {
      const double td = g[r.last];
      const double tc = r.last + 1 == n ? g[0] + kTwoPi : g[r.last + 1];
      r.b = boundary(tc, td);
    }
  }
  return runs;
}

}  // namespace maxlab
