#include "maxlab/io.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "maxlab/errors.hpp"

namespace maxlab::io {

namespace {

std::string num(double x) { return fmt::format("{:.17g}", x); }

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError(fmt::format("cannot open '{}' for writing", path));
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError(fmt::format("write to '{}' failed", path));
}

std::string trim(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
  std::size_t k = 0;
  while (k < s.size() && (s[k] == ' ' || s[k] == '\t')) ++k;
  return s.substr(k);
}

double parse_number(const std::string& cell, const std::string& path, std::size_t line) {
  const std::string s = trim(cell);
  if (s.empty()) throw InvalidInput(fmt::format("{}:{}: empty field", path, line));
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE)
    throw InvalidInput(fmt::format("{}:{}: '{}' is not a number", path, line, s));
  return v;
}

const char* method_name(DerivMethod m) {
  switch (m) {
    case DerivMethod::kNone:
      return "none";
    case DerivMethod::kWitness:
      return "witness";
    case DerivMethod::kFiniteDifference:
      return "finite_difference";
    case DerivMethod::kConnecting:
      return "connecting";
    case DerivMethod::kUnavailable:
      return "unavailable";
  }
  return "?";
}

}  // namespace

Profile read_profile_csv(const std::string& path, const Domain& domain) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open profile '{}'", path));
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<Sample> samples;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty()) continue;
    if (!header) {
      if (line != "t,value")
        throw InvalidInput(
            fmt::format("{}:{}: expected header 't,value', got '{}'", path, lineno, line));
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw InvalidInput(fmt::format("{}:{}: expected two columns", path, lineno));
    samples.push_back({parse_number(line.substr(0, comma), path, lineno),
                       parse_number(line.substr(comma + 1), path, lineno)});
  }
  if (in.bad()) throw IoError(fmt::format("read error on '{}'", path));
  if (!header) throw InvalidInput(fmt::format("{}: empty file, expected header 't,value'", path));
  try {
    return build_profile(std::move(samples), domain);
  } catch (const InvalidInput& e) {
    throw InvalidInput(fmt::format("{}: {}", path, e.what()));
  }
}

void write_profile_csv(const std::string& path, const Profile& f) {
  auto out = open_out(path);
  out << "t,value\n";
  const auto& t = f.breakpoints();
  const auto& v = f.values();
  for (std::size_t i = 0; i < t.size(); ++i) out << num(t[i]) << ',' << num(v[i]) << '\n';
  close_out(out, path);
}

json domain_json(const Domain& d) {
  const char* kind = "line";
  switch (d.kind) {
    case DomainKind::kLine:
      kind = "line";
      break;
    case DomainKind::kRadialHalfLine:
      kind = "radial";
      break;
    case DomainKind::kCircle:
      kind = "circle";
      break;
    case DomainKind::kPolarInterval:
      kind = "polar";
      break;
  }
  return {{"kind", kind}, {"dim", d.dim}};
}

Domain domain_from_json(const json& j) {
  if (!j.is_object() || !j.contains("kind"))
    throw InvalidInput("domain JSON needs a 'kind' field");
  const std::string kind = j.at("kind").get<std::string>();
  const int dim = j.value("dim", 1);
  if (kind == "line") return Domain::line();
  if (kind == "circle") return Domain::circle();
  if (kind == "radial") return Domain::radial(dim);
  if (kind == "polar") return Domain::polar(dim);
  throw InvalidInput(fmt::format("unknown domain kind '{}'", kind));
}

json operator_json(const OperatorSpec& op) {
  return {{"kind", operator_name(op.kind)},
          {"alpha", op.alpha},
          {"search",
           {{"coarse_grid", op.search.coarse_grid},
            {"refine_tol", op.search.refine_tol},
            {"scale_cap", op.search.scale_cap},
            {"time_cap", op.search.time_cap},
            {"restarts", op.search.restarts}}}};
}

void write_field_csv(const std::string& path, const MaximalField& field) {
  auto out = open_out(path);
  out << "t,value,deriv,label,witness_kind,witness_p1,witness_p2,witness_p3,witness_p4\n";
  for (std::size_t i = 0; i < field.size(); ++i) {
    const double d = i < field.deriv.size() ? field.deriv[i] : NAN;
    out << num(field.grid[i]) << ',' << num(field.values[i]) << ',' << num(d) << ','
        << (field.labels[i] == NodeLabel::kConnecting ? "C" : "D") << ',';
    std::visit(
        [&](const auto& w) {
          using T = std::decay_t<decltype(w)>;
          if constexpr (std::is_same_v<T, IntervalWitness>)
            out << "interval," << num(w.a) << ',' << num(w.b) << ",,";
          else if constexpr (std::is_same_v<T, CubeSpec>)
            out << "cube," << num(w.c1) << ',' << num(w.c2) << ',' << num(w.half_side) << ','
                << num(w.phi);
          else
            out << "parabolic," << num(w.y) << ',' << num(w.t) << ",,";
        },
        field.witnesses[i]);
    out << '\n';
  }
  close_out(out, path);
}

json field_json(const MaximalField& field) {
  json j;
  j["operator"] = operator_json(field.op);
  j["domain"] = domain_json(field.f.domain());
  j["grid_size"] = field.size();
  j["gap_tol"] = field.gap_tol;
  std::size_t conn = 0;
  for (auto l : field.labels) conn += l == NodeLabel::kConnecting;
  j["connecting_nodes"] = conn;
  json runs = json::array();
  for (const auto& r : classify_regions(field, field.gap_tol, true))
    runs.push_back({{"a", r.a}, {"b", r.b}, {"first", r.first}, {"last", r.last},
                    {"a_unbounded", r.a_unbounded}, {"b_unbounded", r.b_unbounded}});
  j["disconnecting_intervals"] = runs;
  std::map<std::string, std::size_t> methods;
  for (auto m : field.deriv_method) ++methods[method_name(m)];
  j["derivative_methods"] = methods;
  double mx = 0;
  for (double v : field.values) mx = std::max(mx, v);
  j["max_value"] = mx;
  return j;
}

json decomposition_json(const SunriseDecomposition& dec, const DerivativeTable& table) {
  json j;
  j["domain"] = domain_json(dec.domain);
  if (dec.has_rho) j["rho"] = dec.rho;
  j["tol"] = dec.tol;
  j["nodes"] = dec.t.size();
  j["clamp_count"] = dec.clamp_count;
  json comps = json::array();
  for (const auto& c : dec.components) {
    json cj = {{"a", c.a},
               {"b", c.b},
               {"a_cut", c.a_cut},
               {"b_cut", c.b_cut},
               {"a_infinite", c.a_infinite},
               {"b_infinite", c.b_infinite},
               {"min_value", c.min_value},
               {"tau_side", c.tau_side}};
    if (c.tau_side == 0) {
      cj["tau_minus"] = c.tau_minus;
      cj["tau_plus"] = c.tau_plus;
    } else {
      cj["tau_minus"] = c.tau_side > 0 ? "+inf" : "-inf";
      cj["tau_plus"] = cj["tau_minus"];
    }
    comps.push_back(cj);
  }
  j["components"] = comps;
  std::map<std::string, std::size_t> regions, classes;
  for (auto r : dec.regions) ++regions[region_name(r)];
  for (auto c : dec.deriv_class) ++classes[deriv_class_name(c)];
  j["region_counts"] = regions;
  j["deriv_class_counts"] = classes;
  j["cells_checked"] = table.cells_checked;
  auto viol = [](const std::vector<SlopeViolation>& v) {
    json a = json::array();
    for (const auto& s : v)
      a.push_back({{"node", s.node}, {"t", s.t}, {"slope", s.slope}, {"allowed", s.allowed},
                   {"rule", s.rule}});
    return a;
  };
  j["table_violations"] = viol(table.violations);
  j["monotonicity_violations"] = viol(table.monotonicity);
  return j;
}

void write_lateral_csv(const std::string& path, const SunriseDecomposition& dec) {
  auto out = open_out(path);
  out << "t,f,field,right,left,region,deriv_class\n";
  for (std::size_t k = 0; k < dec.t.size(); ++k)
    out << num(dec.t[k]) << ',' << num(dec.f[k]) << ',' << num(dec.field[k]) << ','
        << num(dec.right[k]) << ',' << num(dec.left[k]) << ',' << region_name(dec.regions[k])
        << ',' << deriv_class_name(dec.deriv_class[k]) << '\n';
  close_out(out, path);
}

json local_max_json(const LocalMaxReport& r) {
  json v = json::array();
  for (const auto& x : r.violations)
    v.push_back({{"node", x.node}, {"t", x.t}, {"value", x.value}, {"left_exit", x.left_exit},
                 {"right_exit", x.right_exit}});
  return {{"tol", r.tol}, {"runs", r.runs}, {"nodes", r.nodes}, {"violations", v},
          {"passed", r.passed()}};
}

json certificate_json(const DyadicCertificate& c) {
  json chain = json::array();
  for (std::size_t i = 0; i < c.chain.size(); ++i) {
    const auto& q = c.chain[i];
    json e = {{"level", i}, {"c1", q.c1}, {"half_side", q.half_side}, {"average", c.averages[i]}};
    if (c.dim == 2) {
      e["c2"] = q.c2;
      e["phi"] = q.phi;
    }
    if (i < c.overlaps.size()) e["overlaps_next"] = c.overlaps[i];
    chain.push_back(e);
  }
  return {{"alpha", c.alpha}, {"dim", c.dim}, {"k", c.k}, {"chain", chain},
          {"max_equal_deviation", c.max_equal_deviation}, {"all_overlap", c.all_overlap()},
          {"cubes_visited", c.cubes_visited}};
}

json flatness_json(const FlatnessReport& r) {
  json a = json::array(), b = json::array();
  for (const auto& x : r.list_a) a.push_back({{"node", x.node}, {"t", x.t}, {"slope", x.slope}});
  for (const auto& s : r.list_b)
    b.push_back({{"t0", s.t0}, {"t1", s.t1}, {"slope", s.slope},
                 {"connecting_nodes", s.connecting_nodes}, {"nodes", s.nodes}});
  return {{"list_a", a}, {"list_b", b}, {"nodes_checked", r.nodes_checked}};
}

json origin_json(const OriginReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"eta", x.eta}, {"ell", x.ell}, {"lhs", x.lhs}, {"rhs_local", x.rhs_local},
                    {"rhs_global", x.rhs_global}, {"rhs_point", x.rhs_point}, {"ratio", x.ratio}});
  return {{"rows", rows}, {"lhs_nonincreasing_as_eta_shrinks", r.lhs_nonincreasing_as_eta_shrinks},
          {"max_ratio", r.max_ratio}};
}

json bound_json(const BoundReport& r) {
  return {{"field_norm", r.field_norm}, {"f_norm", r.f_norm},     {"ratio", r.ratio},
          {"degenerate", r.degenerate}, {"decay_low", r.decay_low}, {"decay_high", r.decay_high},
          {"weak_type", r.weak_type}};
}

namespace {

// Column name and accessor for every scalar of a convergence row.
struct Column {
  const char* name;
  double (*get)(const ConvergenceRow&);
};

const std::vector<Column>& columns() {
  static const std::vector<Column> cols = {
      {"j", [](const ConvergenceRow& r) { return double(r.j); }},
      {"w11_l1", [](const ConvergenceRow& r) { return r.w11.l1; }},
      {"w11_deriv_l1", [](const ConvergenceRow& r) { return r.w11.deriv_l1; }},
      {"w11_sup_tail", [](const ConvergenceRow& r) { return r.w11.sup_tail; }},
      {"sup_f", [](const ConvergenceRow& r) { return r.sup_f; }},
      {"sup_field", [](const ConvergenceRow& r) { return r.sup_field; }},
      {"deriv_distance", [](const ConvergenceRow& r) { return r.deriv_distance; }},
      {"lateral_total", [](const ConvergenceRow& r) { return r.lateral_total; }},
      {"piece_CC", [](const ConvergenceRow& r) { return r.pieces[0]; }},
      {"piece_DC", [](const ConvergenceRow& r) { return r.pieces[1]; }},
      {"piece_CD", [](const ConvergenceRow& r) { return r.pieces[2]; }},
      {"piece_DD", [](const ConvergenceRow& r) { return r.pieces[3]; }},
      {"additivity_residual", [](const ConvergenceRow& r) { return r.additivity_residual; }},
      {"bl_j", [](const ConvergenceRow& r) { return r.bl_j; }},
      {"bl", [](const ConvergenceRow& r) { return r.bl; }},
      {"gamma_j", [](const ConvergenceRow& r) { return r.gamma_j; }},
      {"gamma", [](const ConvergenceRow& r) { return r.gamma; }},
      {"lambda", [](const ConvergenceRow& r) { return r.lambda; }},
      {"identity_residual", [](const ConvergenceRow& r) { return r.identity_residual; }},
      {"branch1_lhs", [](const ConvergenceRow& r) { return r.branch1_lhs; }},
      {"branch1_rhs", [](const ConvergenceRow& r) { return r.branch1_rhs; }},
      {"branch2_lhs", [](const ConvergenceRow& r) { return r.branch2_lhs; }},
      {"branch2_rhs", [](const ConvergenceRow& r) { return r.branch2_rhs; }},
      {"branch", [](const ConvergenceRow& r) { return double(r.branch); }},
      {"lateral_total_alt", [](const ConvergenceRow& r) { return r.lateral_total_alt; }},
      {"lambda_alt", [](const ConvergenceRow& r) { return r.lambda_alt; }},
      {"p1_violations", [](const ConvergenceRow& r) { return double(r.p1_violations); }},
  };
  return cols;
}

}  // namespace

json convergence_json(const ConvergenceReport& r) {
  json rows = json::array();
  for (const auto& row : r.rows) {
    json e;
    for (const auto& c : columns()) e[c.name] = c.get(row);
    e["j"] = row.j;
    e["branch"] = row.branch;
    e["branch1_holds"] = row.branch1;
    e["branch2_holds"] = row.branch2;
    e["p1_violations"] = row.p1_violations;
    rows.push_back(e);
  }
  return {{"operator", r.op},
          {"alpha", r.alpha},
          {"domain", r.domain},
          {"rho", r.rho},
          {"eta", r.eta},
          {"grid_size", r.grid_size},
          {"cells", r.cells},
          {"p1_violations_f", r.p1_violations_f},
          {"rows", rows},
          {"max_additivity_residual", r.max_additivity_residual},
          {"max_identity_residual", r.max_identity_residual},
          {"verdict",
           {{"distance_decreasing", r.distance_decreasing},
            {"lateral_decreasing", r.lateral_decreasing},
            {"lambda_decreasing", r.lambda_decreasing},
            {"branches_recorded", r.branches_recorded},
            {"converged", r.converged()}}}};
}

void write_convergence_csv(const std::string& path, const ConvergenceReport& r) {
  auto out = open_out(path);
  const auto& cols = columns();
  for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k].name;
  out << '\n';
  for (const auto& row : r.rows) {
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << num(cols[k].get(row));
    out << '\n';
  }
  close_out(out, path);
}

std::string convergence_text(const ConvergenceReport& r) {
  std::string s = fmt::format("operator {} alpha {} domain {} rho {} grid {}\n", r.op, r.alpha,
                              r.domain, r.rho, r.grid_size);
  s += fmt::format("{:>3} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>3}\n", "j",
                   "w11'", "dist", "lateral", "CC", "DC", "CD", "DD", "lambda", "br");
  for (const auto& x : r.rows)
    s += fmt::format("{:>3} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.4e} "
                     "{:>11.4e} {:>11.4e} {:>3}\n",
                     x.j, x.w11.deriv_l1, x.deriv_distance, x.lateral_total, x.pieces[0],
                     x.pieces[1], x.pieces[2], x.pieces[3], x.lambda, x.branch);
  s += fmt::format("additivity residual {:.3e}, identity residual {:.3e}\n",
                   r.max_additivity_residual, r.max_identity_residual);
  s += fmt::format("distance decreasing {}, lateral decreasing {}, lambda decreasing {}, "
                   "branches recorded {}\n",
                   r.distance_decreasing, r.lateral_decreasing, r.lambda_decreasing,
                   r.branches_recorded);
  return s;
}

std::string certificate_text(const DyadicCertificate& c) {
  std::string s = fmt::format("alpha {} dim {} minimal level {}\n", c.alpha, c.dim, c.k);
  s += fmt::format("{:>5} {:>14} {:>14} {:>12} {:>18} {:>8}\n", "level", "c1",
                   c.dim == 2 ? "c2" : "-", "half_side", "average", "overlap");
  for (std::size_t i = 0; i < c.chain.size(); ++i) {
    const auto& q = c.chain[i];
    s += fmt::format("{:>5} {:>14.8g} {:>14.8g} {:>12.6g} {:>18.12g} {:>8}\n", i, q.c1, q.c2,
                     q.half_side, c.averages[i],
                     i < c.overlaps.size() ? (c.overlaps[i] ? "yes" : "no") : "");
  }
  return s;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void write_text(const std::string& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  close_out(out, path);
}

}  // namespace maxlab::io
