#include "maxlab/sunrise.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "maxlab/errors.hpp"

namespace maxlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

std::string region_name(Region r) {
  switch (r) {
    case Region::kC:
      return "C";
    case Region::kDminus:
      return "Dminus";
    case Region::kDzero:
      return "Dzero";
    case Region::kDplus:
      return "Dplus";
  }
  return "?";
}

std::string deriv_class_name(DerivClass c) {
  switch (c) {
    case DerivClass::kDplus:
      return "Dplus";
    case DerivClass::kDzero:
      return "Dzero";
    case DerivClass::kDRminus:
      return "DR_Dminus";
    case DerivClass::kC:
      return "C";
    case DerivClass::kCRminus:
      return "CR_Dminus";
  }
  return "?";
}

Profile SunriseDecomposition::lateral_R() const { return Profile::window(domain, t, right); }
Profile SunriseDecomposition::lateral_L() const { return Profile::window(domain, t, left); }

SunriseDecomposition sunrise_decompose(const Profile& f, const MaximalField& field, double rho) {
  if (!(f.domain() == field.f.domain()))
    throw InvalidInput("sunrise_decompose: field and profile live on different domains");
  if (field.size() < 2) throw InvalidInput("sunrise_decompose: field needs >= 2 nodes");
  const auto kind = f.domain().kind;
  const std::size_t n = field.size();
  SunriseDecomposition dec;
  dec.domain = f.domain();
  dec.tol = field.gap_tol;
  dec.scale = f.max_value();

  if (kind == DomainKind::kRadialHalfLine || kind == DomainKind::kPolarInterval) {
    const double top = kind == DomainKind::kPolarInterval ? std::numbers::pi : INFINITY;
    if (rho < 0 || (kind == DomainKind::kPolarInterval && rho >= 0.5 * top))
      throw InvalidInput(fmt::format("sunrise_decompose: rho = {} outside the domain", rho));
    dec.rho = rho;
    dec.has_rho = true;
    for (std::size_t i = 0; i < n; ++i) {
      const double x = field.grid[i];
      if (x > rho && (kind != DomainKind::kPolarInterval || x < top - rho)) dec.node.push_back(i);
    }
    if (dec.node.size() < 2)
      throw InvalidInput("sunrise_decompose: fewer than two grid nodes beyond rho");
    for (auto i : dec.node) dec.t.push_back(field.grid[i]);
  } else if (kind == DomainKind::kCircle) {
    std::size_t s = n;
    for (std::size_t i = 0; i < n; ++i)
      if (field.labels[i] == NodeLabel::kConnecting) {
        s = i;
        break;
      }
    if (s == n)
      throw InvariantFailure(
          "sunrise_decompose: no connecting node on the circle grid (include the maximiser of f)");
    for (std::size_t k = 0; k <= n; ++k) {
      const std::size_t i = (s + k) % n;
      dec.node.push_back(i);
      dec.t.push_back(field.grid[i] + (s + k >= n ? kTwoPi : 0.0));
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) dec.node.push_back(i);
    dec.t = field.grid;
  }

  const std::size_t N = dec.node.size();
  dec.f.resize(N);
  dec.field.resize(N);
  std::vector<bool> dis(N);
  for (std::size_t k = 0; k < N; ++k) {
    const std::size_t i = dec.node[k];
    dec.f[k] = f(field.grid[i]);
    dec.field[k] = field.values[i];
    dis[k] = field.labels[i] == NodeLabel::kDisconnecting;
  }
  dec.right = dec.field;
  dec.left = dec.field;
  dec.regions.assign(N, Region::kC);

  const double plateau_tol = 1e-9 * std::max(dec.scale, 1e-300);
  for (std::size_t p = 0; p < N;) {
    if (!dis[p]) {
      ++p;
      continue;
    }
    std::size_t q = p;
    while (q + 1 < N && dis[q + 1]) ++q;
    SunriseComponent c;
    c.first = p;
    c.last = q;
    const bool has_left = p > 0;
    const bool has_right = q + 1 < N;
    if (has_left) {
      c.a = dec.t[p - 1];
    } else if (kind == DomainKind::kLine) {
      c.a_infinite = true;
      c.a = dec.t.front();
    } else {
      c.a_cut = true;
      c.a = dec.has_rho ? dec.rho : dec.t.front();
    }
    if (has_right) {
      c.b = dec.t[q + 1];
    } else if (kind == DomainKind::kPolarInterval) {
      c.b_cut = true;
      c.b = std::numbers::pi - dec.rho;
    } else {
      c.b_infinite = true;
      c.b = dec.t.back();
    }
    if (c.b_infinite) {
      c.tau_side = 1;
      c.tau_minus = c.tau_plus = c.b;
      c.min_value = 0.0;
    } else if (c.a_infinite) {
      c.tau_side = -1;
      c.tau_minus = c.tau_plus = c.a;
      c.min_value = 0.0;
    } else {
      const std::size_t lo = has_left ? p - 1 : p;
      const std::size_t hi = has_right ? q + 1 : q;
      double m = dec.field[lo];
      for (std::size_t k = lo; k <= hi; ++k) m = std::min(m, dec.field[k]);
      c.min_value = m;
      for (std::size_t k = lo; k <= hi; ++k)
        if (dec.field[k] <= m + plateau_tol) {
          if (c.tau_minus_node == kNoNode) c.tau_minus_node = k;
          c.tau_plus_node = k;
        }
      c.tau_minus = dec.t[c.tau_minus_node];
      c.tau_plus = dec.t[c.tau_plus_node];
    }

    // Right lateral: running maximum of f from the plateau leftwards, capped by the field.
    {
      std::size_t stop;  // nodes p .. stop-1 use W_R
      double run;
      if (c.tau_side == 1) {
        stop = q + 1;
        run = 0.0;
        for (std::size_t k = N; k-- > q + 1;) run = std::max(run, dec.f[k]);
      } else if (c.tau_side == -1) {
        stop = p;
        run = 0.0;
      } else {
        stop = std::max(c.tau_minus_node, p);
        run = dec.field[c.tau_minus_node];
      }
      for (std::size_t k = stop; k-- > p;) {
        run = std::max(run, dec.f[k]);
        if (run > dec.field[k]) ++dec.clamp_count;
        dec.right[k] = std::min(run, dec.field[k]);
      }
    }
    // Left lateral, mirrored.
    if (c.tau_side != 1) {
      double run = 0.0;
      std::size_t from = p;
      if (c.tau_side == -1) {
        for (std::size_t k = 0; k < p; ++k) run = std::max(run, dec.f[k]);
      } else {
        run = dec.field[c.tau_plus_node];
        from = c.tau_plus_node + 1;
      }
      for (std::size_t k = from; k <= q; ++k) {
        run = std::max(run, dec.f[k]);
        if (run > dec.field[k]) ++dec.clamp_count;
        dec.left[k] = std::min(run, dec.field[k]);
      }
    }
    for (std::size_t k = p; k <= q; ++k) {
      if (c.tau_side == 1) {
        dec.regions[k] = Region::kDminus;
      } else if (c.tau_side == -1) {
        dec.regions[k] = Region::kDplus;
      } else if (k < c.tau_minus_node) {
        dec.regions[k] = Region::kDminus;
      } else if (k > c.tau_plus_node) {
        dec.regions[k] = Region::kDplus;
      } else {
        dec.regions[k] = Region::kDzero;
      }
    }
    dec.components.push_back(c);
    p = q + 1;
  }

  dec.in_DR.resize(N);
  dec.in_DL.resize(N);
  dec.deriv_class.resize(N);
  for (std::size_t k = 0; k < N; ++k) {
    dec.in_DR[k] = dec.right[k] - dec.f[k] > dec.tol;
    dec.in_DL[k] = dec.left[k] - dec.f[k] > dec.tol;
    switch (dec.regions[k]) {
      case Region::kC:
        dec.deriv_class[k] = DerivClass::kC;
        break;
      case Region::kDplus:
        dec.deriv_class[k] = DerivClass::kDplus;
        break;
      case Region::kDzero:
        dec.deriv_class[k] = DerivClass::kDzero;
        break;
      case Region::kDminus:
        dec.deriv_class[k] = dec.in_DR[k] ? DerivClass::kDRminus : DerivClass::kCRminus;
        break;
    }
  }
  return dec;
}

DerivativeTable lateral_derivative_table(const SunriseDecomposition& dec, double slope_tol_rel) {
  DerivativeTable tab;
  const std::size_t N = dec.t.size();
  tab.cls = dec.deriv_class;
  tab.slope.assign(N, 0.0);
  const double tol_s = slope_tol_rel * std::max(dec.scale, 1e-300);
  for (std::size_t k = 0; k + 1 < N; ++k) {
    const double h = dec.t[k + 1] - dec.t[k];
    const double sR = (dec.right[k + 1] - dec.right[k]) / h;
    const double sL = (dec.left[k + 1] - dec.left[k]) / h;
    const double value_slack = 2.0 * dec.tol / h;
    tab.slope[k] = sR;
    ++tab.cells_checked;
    auto flag = [&](std::vector<SlopeViolation>& out, double s, double allowed, const char* rule) {
      out.push_back({k, dec.t[k], s, allowed, rule});
    };
    if (tab.cls[k] == tab.cls[k + 1]) {
      switch (tab.cls[k]) {
        case DerivClass::kDplus:
          if (sR < -tol_s) flag(tab.violations, sR, -tol_s, "Dplus: slope >= 0");
          break;
        case DerivClass::kDzero:
          if (std::abs(sR) > tol_s) flag(tab.violations, sR, tol_s, "Dzero: slope = 0");
          break;
        case DerivClass::kDRminus:
          if (std::abs(sR) > tol_s) flag(tab.violations, sR, tol_s, "DR_Dminus: slope = 0");
          break;
        case DerivClass::kC:
          if (std::abs(sR) > tol_s + value_slack)
            flag(tab.violations, sR, tol_s + value_slack, "C: f' = 0");
          break;
        case DerivClass::kCRminus:
          if (sR > tol_s + value_slack)
            flag(tab.violations, sR, tol_s + value_slack, "CR_Dminus: f' <= 0");
          break;
      }
    }
    if (dec.in_DR[k] && dec.in_DR[k + 1] && sR < -tol_s)
      flag(tab.monotonicity, sR, -tol_s, "right lateral nondecreasing on D_R");
    if (!dec.in_DR[k] && !dec.in_DR[k + 1] && sR > tol_s + value_slack)
      flag(tab.monotonicity, sR, tol_s + value_slack, "right lateral nonincreasing on C_R");
    if (dec.in_DL[k] && dec.in_DL[k + 1] && sL > tol_s)
      flag(tab.monotonicity, sL, tol_s, "left lateral nonincreasing on D_L");
    if (!dec.in_DL[k] && !dec.in_DL[k + 1] && sL < -tol_s - value_slack)
      flag(tab.monotonicity, sL, -tol_s - value_slack, "left lateral nondecreasing on C_L");
  }
  return tab;
}

SunriseIdentityReport check_sunrise_identities(const SunriseDecomposition& dec) {
  SunriseIdentityReport r;
  r.nodes = dec.t.size();
  for (std::size_t k = 0; k < r.nodes; ++k) {
    bool bad = false;
    if (dec.right[k] < dec.f[k] || dec.left[k] < dec.f[k]) {
      ++r.below_f;
      bad = true;
    }
    if (dec.right[k] > dec.field[k] || dec.left[k] > dec.field[k]) {
      ++r.above_field;
      bad = true;
    }
    if (std::max(dec.right[k], dec.left[k]) != dec.field[k]) {
      ++r.max_mismatch;
      bad = true;
    }
    if (bad && r.first_bad == kNoNode) r.first_bad = k;
  }
  return r;
}

Profile max_merge(const Profile& g, const Profile& h) { return pointwise_max(g, h); }

}  // namespace maxlab
