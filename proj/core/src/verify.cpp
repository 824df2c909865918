#include "maxlab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>

#include <fmt/format.h>

#include "maxlab/errors.hpp"
#include "maxlab/sunrise.hpp"

namespace maxlab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Cell {
  std::size_t i0, i1;
  double t0, t1;
  double w;  // weighted length, sphere constant included
};

// Consecutive grid cells; the circle closes up.
std::vector<Cell> grid_cells(const MaximalField& field) {
  const Domain& dom = field.f.domain();
  const double c = dom.surface_constant();
  const auto& g = field.grid;
  std::vector<Cell> cells;
  for (std::size_t i = 0; i + 1 < g.size(); ++i)
    cells.push_back({i, i + 1, g[i], g[i + 1], c * dom.weight_integral(g[i], g[i + 1])});
  if (dom.periodic() && g.size() >= 2)
    cells.push_back({g.size() - 1, 0, g.back(), g.front() + kTwoPi,
                     g.front() + kTwoPi - g.back()});
  return cells;
}

double slope(const std::vector<double>& v, const Cell& c) {
  return (v[c.i1] - v[c.i0]) / (c.t1 - c.t0);
}

// Node index runs of disconnecting nodes, each with its bracketing nodes (kNoNode when the run
// reaches the end of a non-periodic grid).
struct Run {
  std::vector<std::size_t> nodes;
  std::size_t before = kNoNode;
  std::size_t after = kNoNode;
};

std::vector<Run> disconnecting_runs(const MaximalField& field) {
  const std::size_t n = field.size();
  const bool periodic = field.f.domain().periodic();
  auto dis = [&](std::size_t i) { return field.labels[i] == NodeLabel::kDisconnecting; };
  std::vector<Run> runs;
  std::size_t start = 0;
  if (periodic) {
    start = n;
    for (std::size_t i = 0; i < n; ++i)
      if (!dis(i)) {
        start = i;
        break;
      }
    if (start == n) return runs;  // no connecting node: nothing bracketed
  }
  const std::size_t span = periodic ? n : n;
  for (std::size_t k = 0; k < span;) {
    const std::size_t i = (start + k) % n;
    if (!dis(i)) {
      ++k;
      continue;
    }
    Run r;
    if (k > 0 || periodic) r.before = (start + k + n - 1) % n;
    if (!periodic && k == 0) r.before = kNoNode;
    while (k < span && dis((start + k) % n)) {
      r.nodes.push_back((start + k) % n);
      ++k;
    }
    if (k < span)
      r.after = (start + k) % n;
    else if (periodic)
      r.after = start;
    runs.push_back(std::move(r));
  }
  return runs;
}

bool constant_on(const Profile& f, double lo, double hi) {
  const double v = f(lo);
  const double tol = 1e-14 * std::max(f.max_abs(), 1e-300);
  if (std::abs(f(hi) - v) > tol) return false;
  for (double t : f.knots())
    if (t > lo && t < hi && std::abs(f(t) - v) > tol) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------------------------

LocalMaxReport check_no_strict_local_max(const MaximalField& field, double tol_rel) {
  LocalMaxReport rep;
  rep.tol = tol_rel * std::max(field.f.max_value(), 1e-300);
  const auto& v = field.values;
  for (const Run& run : disconnecting_runs(field)) {
    ++rep.runs;
    const std::size_t m = run.nodes.size();
    rep.nodes += m;
    for (std::size_t p = 0; p < m;) {
      const double vp = v[run.nodes[p]];
      std::size_t q = p;
      while (q + 1 < m && std::abs(v[run.nodes[q + 1]] - vp) <= rep.tol) ++q;
      const std::size_t left = p > 0 ? run.nodes[p - 1] : run.before;
      const std::size_t right = q + 1 < m ? run.nodes[q + 1] : run.after;
      if (left != kNoNode && right != kNoNode) {
        const double le = v[left], re = v[right];
        if (le < vp - rep.tol && re < v[run.nodes[q]] - rep.tol)
          rep.violations.push_back({run.nodes[p], field.grid[run.nodes[p]], vp, le, re});
      }
      p = q + 1;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------

bool DyadicCertificate::all_overlap() const {
  return std::all_of(overlaps.begin(), overlaps.end(), [](bool b) { return b; });
}

std::vector<CubeSpec> dyadic_children(const CubeSpec& q) {
  const double h = 0.5 * q.half_side;
  std::vector<CubeSpec> out;
  if (q.dim == 1) {
    for (int s : {-1, 1}) out.push_back({1, q.c1 + s * h, 0.0, h, 0.0});
    return out;
  }
  const double c = std::cos(q.phi), s = std::sin(q.phi);
  for (int sx : {-1, 1})
    for (int sy : {-1, 1}) {
      const double dx = sx * h, dy = sy * h;
      out.push_back({2, q.c1 + c * dx - s * dy, q.c2 + s * dx + c * dy, h, q.phi});
    }
  return out;
}

bool dyadic_overlap(const CubeSpec& parent, const CubeSpec& child, double alpha) {
  double off;
  if (parent.dim == 1) {
    off = std::abs(child.c1 - parent.c1);
  } else {
    const double dx = child.c1 - parent.c1, dy = child.c2 - parent.c2;
    const double c = std::cos(parent.phi), s = std::sin(parent.phi);
    off = std::max(std::abs(c * dx + s * dy), std::abs(-s * dx + c * dy));
  }
  const double reach = alpha * (parent.half_side + child.half_side);
  return off <= reach + 1e-9 * parent.half_side;
}

DyadicCertificate dyadic_ancestry_certificate(const Profile& f, const CubeSpec& q0, double alpha,
                                              int d, int depth_cap, std::size_t max_cubes) {
  if (d != 1 && d != 2) throw InvalidInput(fmt::format("dyadic certificate: d = {} not in {{1, 2}}", d));
  if (q0.dim != d) throw InvalidInput("dyadic certificate: cube dimension differs from d");
  if (!(q0.half_side > 0)) throw InvalidInput("dyadic certificate: cube side must be positive");
  if (d == 1 && f.domain().kind != DomainKind::kLine)
    throw Unsupported("dyadic certificate in d = 1 needs a line profile");
  if (d == 2 && !(f.domain().kind == DomainKind::kRadialHalfLine && f.domain().dim == 2))
    throw Unsupported("dyadic certificate in d = 2 needs a radial:2 profile");

  double lo, hi;
  if (d == 1) {
    lo = q0.c1 - q0.half_side;
    hi = q0.c1 + q0.half_side;
  } else {
    // Range of |y| over the square.
    const double c = std::cos(q0.phi), s = std::sin(q0.phi);
    const double u = c * q0.c1 + s * q0.c2, w = -s * q0.c1 + c * q0.c2;
    const double du = std::max(0.0, std::abs(u) - q0.half_side);
    const double dw = std::max(0.0, std::abs(w) - q0.half_side);
    lo = std::hypot(du, dw);
    hi = std::hypot(std::abs(u) + q0.half_side, std::abs(w) + q0.half_side);
  }
  if (constant_on(f, lo, hi))
    throw InvalidInput("dyadic certificate: f is constant on the base cube, no larger descendant");

  DyadicCertificate cert;
  cert.alpha = alpha;
  cert.dim = d;
  const double base = cube_average(f, q0);
  const double strict = 1e-10 * std::max(std::abs(base), 1e-300);

  struct Node {
    CubeSpec q;
    double avg;
    std::size_t parent;
  };
  std::vector<Node> all{{q0, base, kNoNode}};
  std::vector<std::size_t> level{0};
  std::size_t found = kNoNode;
  for (int k = 1; k <= depth_cap && found == kNoNode; ++k) {
    std::vector<std::size_t> next;
    for (std::size_t idx : level) {
      for (const CubeSpec& ch : dyadic_children(all[idx].q)) {
        if (all.size() >= max_cubes)
          throw InvariantFailure(fmt::format(
              "dyadic certificate: cube budget {} exhausted at level {}", max_cubes, k));
        all.push_back({ch, cube_average(f, ch), idx});
        next.push_back(all.size() - 1);
        if (found == kNoNode && all.back().avg > base + strict) found = all.size() - 1;
      }
    }
    level = std::move(next);
  }
  if (found == kNoNode)
    throw InvariantFailure(
        fmt::format("dyadic certificate: no larger descendant within depth {}", depth_cap));
  cert.cubes_visited = all.size();

  std::vector<std::size_t> chain;
  for (std::size_t i = found; i != kNoNode; i = all[i].parent) chain.push_back(i);
  std::reverse(chain.begin(), chain.end());
  cert.k = static_cast<int>(chain.size()) - 1;
  for (std::size_t i : chain) {
    cert.chain.push_back(all[i].q);
    cert.averages.push_back(all[i].avg);
  }
  for (int i = 0; i < cert.k; ++i) {
    cert.max_equal_deviation =
        std::max(cert.max_equal_deviation, std::abs(cert.averages[i] - base));
    cert.overlaps.push_back(dyadic_overlap(cert.chain[i], cert.chain[i + 1], alpha));
  }
  return cert;
}

// ---------------------------------------------------------------------------------------------

FlatnessReport check_flatness(const MaximalField& field, const Profile& f,
                              double slope_tol_rel) {
  FlatnessReport rep;
  const auto& kt = f.knots();
  const auto& kv = f.knot_values();
  const double stol = slope_tol_rel * std::max(f.max_value(), 1e-300);
  const double vtol = 10.0 * field.gap_tol;
  const bool periodic = f.domain().periodic();
  std::vector<FlatSegment> segs(kt.size() - 1);
  for (std::size_t k = 0; k + 1 < kt.size(); ++k)
    segs[k] = {kt[k], kt[k + 1], (kv[k + 1] - kv[k]) / (kt[k + 1] - kt[k]), 0, 0};

  for (std::size_t i = 0; i < field.size(); ++i) {
    double t = field.grid[i];
    if (periodic) {
      while (t < kt.front()) t += kTwoPi;
      while (t >= kt.back()) t -= kTwoPi;
    }
    if (t <= kt.front() || t >= kt.back()) continue;  // outside the knot range f is flat
    auto it = std::upper_bound(kt.begin(), kt.end(), t);
    const std::size_t k = static_cast<std::size_t>(it - kt.begin()) - 1;
    const double e = std::min(t - kt[k], kt[k + 1] - t);
    if (e <= 0) continue;  // at a knot
    ++rep.nodes_checked;
    const double s = segs[k].slope;
    if (!(std::abs(s) > stol && std::abs(s) * e > vtol)) continue;
    ++segs[k].nodes;
    if (field.labels[i] == NodeLabel::kConnecting) {
      ++segs[k].connecting_nodes;
      rep.list_a.push_back({i, field.grid[i], s});
    }
  }
  for (const auto& s : segs)
    if (s.connecting_nodes > 0) rep.list_b.push_back(s);
  return rep;
}

// ---------------------------------------------------------------------------------------------

OriginRow origin_control(const Profile& f, const MaximalField& field, double eta, double ell) {
  const Domain& dom = f.domain();
  if (dom.kind != DomainKind::kRadialHalfLine)
    throw Unsupported("origin control needs a radial profile");
  if (!(ell > 2)) throw InvalidInput(fmt::format("origin control: ell = {} must exceed 2", ell));
  if (!(eta > 0)) throw InvalidInput(fmt::format("origin control: eta = {} must be positive", eta));
  OriginRow row;
  row.eta = eta;
  row.ell = ell;
  const double c = dom.surface_constant();
  const auto& g = field.grid;
  for (std::size_t i = 0; i + 1 < g.size() && g[i] < eta; ++i) {
    const double hi = std::min(g[i + 1], eta);
    const double s = (field.values[i + 1] - field.values[i]) / (g[i + 1] - g[i]);
    row.lhs += std::abs(s) * c * dom.weight_integral(g[i], hi);
  }
  const double r = ell * eta;
  row.rhs_local = weighted_derivative_l1(f, 0.0, r);
  row.rhs_global = std::pow(ell, -dom.dim) * weighted_derivative_l1(f);
  row.rhs_point = f(r) * std::pow(r, dom.dim - 1);
  const double sum = row.rhs_local + row.rhs_global + row.rhs_point;
  row.ratio = row.lhs == 0 ? 0.0 : (sum > 0 ? row.lhs / sum : INFINITY);
  return row;
}

OriginReport origin_control_sweep(const Profile& f, const MaximalField& field,
                                  const std::vector<double>& etas,
                                  const std::vector<double>& ells) {
  OriginReport rep;
  std::vector<double> e = etas;
  std::sort(e.begin(), e.end());
  double prev = -INFINITY;
  for (double eta : e) {
    for (double ell : ells) {
      rep.rows.push_back(origin_control(f, field, eta, ell));
      rep.max_ratio = std::max(rep.max_ratio, rep.rows.back().ratio);
    }
    const double lhs = rep.rows.back().lhs;
    if (lhs < prev - 1e-12 * std::max(1.0, prev)) rep.lhs_nonincreasing_as_eta_shrinks = false;
    prev = lhs;
  }
  return rep;
}

// ---------------------------------------------------------------------------------------------

bool decreasing_trend(const std::vector<double>& xs, double floor, int allowed_inversions,
                      double factor) {
  if (xs.empty()) return false;
  if (xs.back() <= floor) return true;
  if (!(xs.back() < xs.front() / factor)) return false;
  int inversions = 0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i)
    if (xs[i + 1] > xs[i] && xs[i + 1] > floor) ++inversions;
  return inversions <= allowed_inversions;
}

std::vector<double> experiment_grid(const Profile& f, const std::vector<Profile>& seq, int n) {
  std::vector<double> g = make_grid(f, n);
  const double lo = g.front(), hi = g.back();
  const double gap = 1e-9 * std::max(1.0, hi - lo);
  std::vector<double> extra;
  for (const auto& p : seq)
    for (double t : p.breakpoints())
      if (t >= lo && t <= hi) extra.push_back(t);
  g.insert(g.end(), extra.begin(), extra.end());
  std::sort(g.begin(), g.end());
  std::vector<double> out;
  for (double t : g)
    if (out.empty() || t - out.back() > gap) out.push_back(t);
  return out;
}

namespace {

// Right lateral data of one function on a fixed cell set.
struct Lateral {
  std::vector<double> R;  // by grid index (NaN where not lateral)
  std::vector<double> f;
  std::vector<char> inD;  // by cell
  std::vector<double> sR, sf;  // by cell
  double phi = 0;    // int_D R' w - int_D f' w
  double gamma = 0;
  double dw = 0;     // int_D (f - R) w'
  double identity_residual = 0;
};

Lateral lateral(const Profile& f, const MaximalField& field, double rho,
                const std::vector<Cell>& cells) {
  const SunriseDecomposition dec = sunrise_decompose(f, field, rho);
  const std::size_t n = field.size();
  Lateral L;
  L.R.assign(n, NAN);
  L.f.assign(n, NAN);
  std::vector<char> dr(n, 0);
  for (std::size_t k = 0; k < dec.node.size(); ++k) {
    L.R[dec.node[k]] = dec.right[k];
    L.f[dec.node[k]] = dec.f[k];
    dr[dec.node[k]] = dec.in_DR[k] ? 1 : 0;
  }
  const Domain& dom = f.domain();
  const double c = dom.surface_constant();
  const std::size_t m = cells.size();
  L.inD.resize(m);
  L.sR.resize(m);
  L.sf.resize(m);
  double lhs = 0;
  for (std::size_t q = 0; q < m; ++q) {
    const Cell& cl = cells[q];
    if (std::isnan(L.R[cl.i0]) || std::isnan(L.R[cl.i1]))
      throw InvariantFailure(
          fmt::format("continuity: cell at t = {} lies outside the lateral window", cl.t0));
    L.inD[q] = dr[cl.i0] || dr[cl.i1];
    L.sR[q] = slope(L.R, cl);
    L.sf[q] = slope(L.f, cl);
    if (L.inD[q]) {
      lhs += (L.sR[q] - L.sf[q]) * cl.w;
      L.dw += c * dom.integrate_linear_dw(cl.t0, cl.t1, L.f[cl.i0] - L.R[cl.i0],
                                          L.f[cl.i1] - L.R[cl.i1]);
    }
  }
  // Boundary terms of the D runs; on the circle start from a cell outside D.
  const bool periodic = dom.periodic();
  std::size_t start = 0;
  if (periodic) {
    start = m;
    for (std::size_t q = 0; q < m; ++q)
      if (!L.inD[q]) {
        start = q;
        break;
      }
  }
  if (start < m || !periodic) {
    auto term = [&](std::size_t i, double t) {
      return c * (L.f[i] - L.R[i]) * dom.weight(t);
    };
    for (std::size_t k = 0; k < m;) {
      const std::size_t q = (start + k) % m;
      if (!L.inD[q]) {
        ++k;
        continue;
      }
      const Cell& first = cells[q];
      std::size_t last = q;
      while (k < m && L.inD[(start + k) % m]) {
        last = (start + k) % m;
        ++k;
      }
      L.gamma += term(first.i0, first.t0) - term(cells[last].i1, cells[last].t1);
    }
  }
  L.phi = lhs;
  L.identity_residual = std::abs(lhs - (L.gamma + L.dw));
  return L;
}

}  // namespace

ConvergenceReport continuity_experiment(const Profile& f, const std::vector<Profile>& seq,
                                        const OperatorSpec& op, double rho,
                                        const std::vector<double>& grid, int threads) {
  for (const auto& p : seq)
    if (!(p.domain() == f.domain()))
      throw InvalidInput("continuity: sequence and limit live on different domains");
  const Domain& dom = f.domain();
  ConvergenceReport rep;
  rep.op = operator_name(op.kind);
  rep.alpha = op.alpha;
  rep.domain = dom.name();
  rep.rho = dom.weighted() ? rho : 0.0;
  rep.eta = dom.weighted() ? 2.0 * rho : 0.0;
  rep.grid_size = grid.size();

  const MaximalField field = evaluate(op, f, grid, threads);
  rep.p1_violations_f = check_no_strict_local_max(field).violations.size();
  const SunriseDecomposition dec0 = sunrise_decompose(f, field, rho);

  // Window cells: consecutive lateral nodes, beyond eta on weighted domains.
  std::vector<Cell> all = grid_cells(field);
  std::vector<char> lateral_node(grid.size(), 0);
  for (auto i : dec0.node) lateral_node[i] = 1;
  std::vector<Cell> cells;
  for (const Cell& c : all) {
    if (!lateral_node[c.i0] || !lateral_node[c.i1]) continue;
    if (dom.weighted() && c.t0 < rep.eta) continue;
    if (dom.kind == DomainKind::kPolarInterval && c.t1 > std::numbers::pi - rep.eta) continue;
    cells.push_back(c);
  }
  rep.cells = cells.size();
  if (cells.empty()) throw InvalidInput("continuity: no grid cells inside the lateral window");

  const Lateral L0 = lateral(f, field, rho, cells);
  MaximalField field_alt = field;
  relabel(field_alt, 10.0 * field.gap_tol);
  const Lateral L0alt = lateral(f, field_alt, rho, cells);

  const double delta = 0.01;
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const Profile& fj = seq[j];
    ConvergenceRow row;
    row.j = static_cast<int>(j) + 1;
    row.w11 = w11_distance(fj, f, delta);
    const MaximalField fieldj = evaluate(op, fj, grid, threads);
    row.p1_violations = check_no_strict_local_max(fieldj).violations.size();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (dom.kind == DomainKind::kRadialHalfLine && grid[i] < delta) continue;
      row.sup_f = std::max(row.sup_f, std::abs(fieldj.f_at(i) - field.f_at(i)));
      row.sup_field = std::max(row.sup_field, std::abs(fieldj.values[i] - field.values[i]));
    }
    for (const Cell& c : all)
      row.deriv_distance += std::abs(slope(fieldj.values, c) - slope(field.values, c)) * c.w;

    const Lateral Lj = lateral(fj, fieldj, rho, cells);
    for (std::size_t q = 0; q < cells.size(); ++q) {
      const double d = std::abs(Lj.sR[q] - L0.sR[q]) * cells[q].w;
      row.lateral_total += d;
      row.pieces[(L0.inD[q] ? 1 : 0) + (Lj.inD[q] ? 2 : 0)] += d;
      if (L0.inD[q]) {
        row.bl_j += std::abs(Lj.sR[q]) * cells[q].w;
        row.bl += std::abs(L0.sR[q]) * cells[q].w;
        if (Lj.inD[q]) {
          row.branch2_lhs += Lj.sR[q] * cells[q].w;
          row.branch2_rhs += Lj.sf[q] * cells[q].w;
        }
      } else if (Lj.inD[q]) {
        row.branch1_lhs += Lj.sR[q] * cells[q].w;
        row.branch1_rhs += Lj.sf[q] * cells[q].w;
      }
    }
    row.additivity_residual =
        std::abs(row.pieces[0] + row.pieces[1] + row.pieces[2] + row.pieces[3] - row.lateral_total);
    row.gamma = L0.gamma;
    row.gamma_j = Lj.gamma;
    row.lambda = (Lj.gamma - L0.gamma) + (Lj.dw - L0.dw);
    row.identity_residual = std::max(L0.identity_residual, Lj.identity_residual);
    row.branch2_rhs += L0.phi + row.lambda;
    auto holds = [](double lhs, double rhs) {
      return lhs <= rhs + 1e-9 * std::max({1.0, std::abs(lhs), std::abs(rhs)});
    };
    row.branch1 = holds(row.branch1_lhs, row.branch1_rhs);
    row.branch2 = holds(row.branch2_lhs, row.branch2_rhs);
    row.branch = row.branch1 ? 1 : (row.branch2 ? 2 : 0);

    MaximalField fieldj_alt = fieldj;
    relabel(fieldj_alt, 10.0 * fieldj.gap_tol);
    const Lateral Ljalt = lateral(fj, fieldj_alt, rho, cells);
    for (std::size_t q = 0; q < cells.size(); ++q)
      row.lateral_total_alt += std::abs(Ljalt.sR[q] - L0alt.sR[q]) * cells[q].w;
    row.lambda_alt = (Ljalt.gamma - L0alt.gamma) + (Ljalt.dw - L0alt.dw);

    rep.max_additivity_residual = std::max(rep.max_additivity_residual, row.additivity_residual);
    rep.max_identity_residual = std::max(rep.max_identity_residual, row.identity_residual);
    rep.rows.push_back(row);
  }

  std::vector<double> dist, lat, lam;
  for (const auto& r : rep.rows) {
    dist.push_back(r.deriv_distance);
    lat.push_back(r.lateral_total);
    lam.push_back(std::abs(r.lambda));
  }
  const double floor = 1e-9 * std::max(1.0, f.max_value());
  rep.distance_decreasing = decreasing_trend(dist, floor);
  rep.lateral_decreasing = decreasing_trend(lat, floor);
  // |lambda_j| can change sign near j = 1, so only a net decrease is asked of it
  rep.lambda_decreasing = decreasing_trend(lam, floor, 1, 1.0);
  rep.branches_recorded = !rep.rows.empty() &&
                          std::all_of(rep.rows.begin(), rep.rows.end(),
                                      [](const ConvergenceRow& r) { return r.branch != 0; });
  return rep;
}

// ---------------------------------------------------------------------------------------------

double field_variation(const MaximalField& field) {
  const Domain& dom = field.f.domain();
  const auto& v = field.values;
  switch (dom.kind) {
    case DomainKind::kLine:
      return variation(v) + std::abs(v.front()) + std::abs(v.back());
    case DomainKind::kCircle:
      return variation(v) + std::abs(v.back() - v.front());
    default: {
      double s = 0;
      for (const Cell& c : grid_cells(field)) s += std::abs(slope(v, c)) * c.w;
      return s;
    }
  }
}

BoundReport bound_suite(const Profile& f, const MaximalField& field) {
  BoundReport rep;
  const Domain& dom = f.domain();
  rep.field_norm = field_variation(field);
  rep.f_norm = dom.weighted() ? weighted_derivative_l1(f) : variation(f);
  if (rep.f_norm == 0) {
    rep.degenerate = rep.field_norm == 0;
    rep.ratio = rep.degenerate ? 0.0 : INFINITY;
  } else {
    rep.ratio = rep.field_norm / rep.f_norm;
  }
  const auto& g = field.grid;
  rep.decay_low = dom.weight(g.front()) * field.values.front();
  rep.decay_high = dom.weight(g.back()) * field.values.back();

  const double l1 = weighted_l1(f);
  if (l1 > 0) {
    std::vector<double> levels = field.values;
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    const std::size_t keep = 256;
    std::vector<double> cand;
    if (levels.size() <= keep) {
      cand = levels;
    } else {
      for (std::size_t k = 0; k < keep; ++k) cand.push_back(levels[k * (levels.size() - 1) / (keep - 1)]);
    }
    const auto cells = grid_cells(field);
    const double c = dom.surface_constant();
    for (double lam : cand) {
      if (!(lam > 0)) continue;
      double meas = 0;
      for (const Cell& cl : cells) {
        const double v0 = field.values[cl.i0], v1 = field.values[cl.i1];
        if (v0 >= lam && v1 >= lam) {
          meas += cl.w;
        } else if (v0 >= lam || v1 >= lam) {
          const double ts = cl.t0 + (lam - v0) / (v1 - v0) * (cl.t1 - cl.t0);
          meas += v1 > v0 ? c * dom.weight_integral(ts, cl.t1) : c * dom.weight_integral(cl.t0, ts);
        }
      }
      rep.weak_type = std::max(rep.weak_type, lam * meas / l1);
    }
  }
  return rep;
}

}  // namespace maxlab
