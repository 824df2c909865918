#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "manifest.hpp"
#include "maxlab/corpus.hpp"
#include "maxlab/errors.hpp"
#include "maxlab/io.hpp"
#include "maxlab/sunrise.hpp"
#include "maxlab/verify.hpp"

namespace maxlab::cli {

using nlohmann::json;

json RunManifest::to_json() const {
  json j;
  j["command"] = command;
  j["inputs"] = inputs;
  j["domain"] = io::domain_json(domain());
  j["operator"] = io::operator_json(op);
  j["grid"] = grid;
  j["tolerances"] = {{"gap", tol}, {"slope_rel", slope_tol}};
  if (command == "sunrise" || command == "converge" || command == "verify") j["rho"] = rho;
  if (command == "verify") {
    j["suite"] = suite;
    j["corpus"] = corpus;
    j["seed"] = seed;
  }
  if (command == "converge") {
    j["sequence"] = sequence;
    j["perturbation"] = perturbation;
    if (!perturbation.empty()) j["count"] = count;
  }
  if (command == "certify") {
    j["q0"] = q0;
    j["depth"] = depth;
  }
  return j;
}

namespace {

std::string out_path(const RunManifest& m, const std::string& name) {
  std::error_code ec;
  std::filesystem::create_directories(m.out, ec);
  if (ec) throw IoError(fmt::format("cannot create output directory {}: {}", m.out, ec.message()));
  return (std::filesystem::path(m.out) / name).string();
}

Profile load_one(const RunManifest& m) {
  if (m.inputs.size() != 1)
    throw InvalidInput(fmt::format("{}: exactly one --in profile required", m.command));
  return abs_reduce(io::read_profile_csv(m.inputs.front(), m.domain()));
}

MaximalField compute_field(const RunManifest& m, const Profile& f) {
  auto field = evaluate(m.op, f, make_grid(f, m.grid), m.threads);
  if (m.tol > 0) relabel(field, m.tol);
  return field_derivative(std::move(field));
}

struct SuiteResult {
  bool passed = true;
  json report;
  std::string note;
};

SuiteResult run_suite(const RunManifest& m, const Profile& f, const std::string& suite) {
  SuiteResult r;
  const auto field = compute_field(m, f);
  const Domain d = f.domain();
  if (suite == "p1") {
    const auto rep = check_no_strict_local_max(field);
    r.passed = rep.passed();
    r.report = io::local_max_json(rep);
    if (!r.passed) {
      const auto& v = rep.violations.front();
      r.note = fmt::format("strict local maximum in a disconnecting interval at node {} (t = {:.9g})",
                           v.node, v.t);
    }
  } else if (suite == "flatness") {
    const auto rep = check_flatness(field, f, m.slope_tol);
    r.passed = rep.list_a.empty();
    r.report = io::flatness_json(rep);
    if (!r.passed) {
      const auto& v = rep.list_a.front();
      r.note = fmt::format("connecting node {} (t = {:.9g}) where f' = {:.3g}", v.node, v.t, v.slope);
    }
  } else if (suite == "sunrise") {
    const auto dec = sunrise_decompose(f, field, m.rho);
    const auto table = lateral_derivative_table(dec, m.slope_tol);
    const auto id = check_sunrise_identities(dec);
    r.passed = id.passed() && table.violations.empty() && table.monotonicity.empty();
    r.report = io::decomposition_json(dec, table);
    r.report["identities"] = {{"nodes", id.nodes},
                              {"below_f", id.below_f},
                              {"above_field", id.above_field},
                              {"max_mismatch", id.max_mismatch}};
    if (!id.passed())
      r.note = fmt::format("lateral identity fails at lateral node {} (t = {:.9g})", id.first_bad,
                           dec.t[id.first_bad]);
    else if (!table.violations.empty())
      r.note = fmt::format("derivative table rule {} fails at node {}", table.violations[0].rule,
                           table.violations[0].node);
    else if (!table.monotonicity.empty())
      r.note = fmt::format("lateral monotonicity ({}) fails at node {}",
                           table.monotonicity[0].rule, table.monotonicity[0].node);
  } else if (suite == "bound") {
    const auto rep = bound_suite(f, field);
    r.report = io::bound_json(rep);
    // Only the constant-one variation claim is pass/fail.
    const bool claimed = (d.kind == DomainKind::kLine || d.kind == DomainKind::kCircle) &&
                         (m.op.kind == OperatorKind::kUncenteredHL ||
                          m.op.kind == OperatorKind::kSphereUncentered ||
                          (m.op.kind == OperatorKind::kNonTangentialCube && m.op.alpha >= 1.0 / 3.0));
    if (claimed && !rep.degenerate) {
      r.passed = rep.ratio <= 1.0 + 1e-6;
      if (!r.passed) r.note = fmt::format("variation ratio {:.9g} exceeds 1", rep.ratio);
    }
  } else if (suite == "origin") {
    if (d.kind != DomainKind::kRadialHalfLine)
      throw Unsupported("verify --suite origin: radial domain required");
    const auto rep = origin_control_sweep(f, field, {0.4, 0.2, 0.1, 0.05, 0.025}, {3.0, 4.0, 8.0});
    r.report = io::origin_json(rep);
    r.passed = std::isfinite(rep.max_ratio);
    if (!r.passed) r.note = "origin ratio is not finite";
  } else {
    throw InvalidInput(fmt::format("verify: unknown suite '{}'", suite));
  }
  return r;
}

}  // namespace

int cmd_eval(const RunManifest& m) {
  const Profile f = load_one(m);
  const auto field = compute_field(m, f);
  io::write_field_csv(out_path(m, "field.csv"), field);
  json j = io::field_json(field);
  j["manifest"] = m.to_json();
  j["local_max"] = io::local_max_json(check_no_strict_local_max(field));
  io::write_text(out_path(m, "field.json"), io::dump(j));
  return kPass;
}

int cmd_sunrise(const RunManifest& m) {
  const Profile f = load_one(m);
  const auto field = compute_field(m, f);
  const auto dec = sunrise_decompose(f, field, m.rho);
  const auto table = lateral_derivative_table(dec, m.slope_tol);
  const auto id = check_sunrise_identities(dec);
  json j = io::decomposition_json(dec, table);
  j["manifest"] = m.to_json();
  j["identities"] = {{"nodes", id.nodes},
                     {"below_f", id.below_f},
                     {"above_field", id.above_field},
                     {"max_mismatch", id.max_mismatch},
                     {"passed", id.passed()}};
  io::write_text(out_path(m, "sunrise.json"), io::dump(j));
  io::write_lateral_csv(out_path(m, "lateral.csv"), dec);
  io::write_field_csv(out_path(m, "field.csv"), field);
  if (!id.passed())
    throw InvariantFailure(fmt::format("{}: lateral identity fails at lateral node {} (t = {:.9g})",
                                       m.inputs.front(), id.first_bad, dec.t[id.first_bad]));
  if (!table.violations.empty())
    throw InvariantFailure(fmt::format("{}: derivative table rule {} fails at node {}",
                                       m.inputs.front(), table.violations[0].rule,
                                       table.violations[0].node));
  if (!table.monotonicity.empty())
    throw InvariantFailure(fmt::format("{}: lateral monotonicity ({}) fails at node {}",
                                       m.inputs.front(), table.monotonicity[0].rule,
                                       table.monotonicity[0].node));
  return kPass;
}

int cmd_verify(const RunManifest& m) {
  std::vector<std::string> suites;
  if (m.suite == "all") {
    suites = {"p1", "flatness", "sunrise", "bound"};
    if (m.domain().kind == DomainKind::kRadialHalfLine) suites.push_back("origin");
  } else {
    suites = {m.suite};
  }
  std::vector<std::pair<std::string, Profile>> profiles;
  for (const auto& p : m.inputs)
    profiles.emplace_back(p, abs_reduce(io::read_profile_csv(p, m.domain())));
  if (m.corpus > 0) {
    const auto corpus = random_corpus(m.domain(), m.corpus, m.seed);
    for (std::size_t i = 0; i < corpus.size(); ++i)
      profiles.emplace_back(fmt::format("corpus[{}]", i), corpus[i]);
  }
  if (profiles.empty()) throw InvalidInput("verify: no profiles (use --in or --corpus)");

  json j;
  j["manifest"] = m.to_json();
  json rows = json::array();
  std::string text;
  std::size_t failures = 0;
  for (const auto& suite : suites) {
    for (const auto& [name, f] : profiles) {
      const auto r = run_suite(m, f, suite);
      failures += !r.passed;
      rows.push_back({{"suite", suite}, {"profile", name}, {"passed", r.passed}, {"report", r.report}});
      text += fmt::format("{:<9} {:<14} {}{}\n", suite, name, r.passed ? "PASS" : "FAIL",
                          r.note.empty() ? "" : "  " + r.note);
    }
  }
  j["results"] = rows;
  j["failures"] = failures;
  j["passed"] = failures == 0;
  io::write_text(out_path(m, "verify.json"), io::dump(j));
  io::write_text(out_path(m, "verify.txt"), text);
  std::fputs(text.c_str(), stdout);
  return failures == 0 ? kPass : kInvariant;
}

int cmd_converge(const RunManifest& m) {
  const Profile f = load_one(m);
  std::vector<Profile> seq;
  for (const auto& p : m.sequence) seq.push_back(abs_reduce(io::read_profile_csv(p, m.domain())));
  if (!m.perturbation.empty()) {
    const Profile g = io::read_profile_csv(m.perturbation, m.domain());
    for (int j = 1; j <= m.count; ++j) seq.push_back(abs_reduce(combine(1.0, f, 1.0 / j, g)));
  }
  if (seq.empty()) throw InvalidInput("converge: empty sequence (use --seq or --perturb)");
  const auto grid = experiment_grid(f, seq, m.grid);
  const auto rep = continuity_experiment(f, seq, m.op, m.rho, grid, m.threads);
  json j = io::convergence_json(rep);
  j["manifest"] = m.to_json();
  io::write_text(out_path(m, "convergence.json"), io::dump(j));
  io::write_convergence_csv(out_path(m, "convergence.csv"), rep);
  const auto text = io::convergence_text(rep);
  io::write_text(out_path(m, "convergence.txt"), text);
  std::fputs(text.c_str(), stdout);
  return kPass;
}

int cmd_certify(const RunManifest& m) {
  const Profile f = load_one(m);
  CubeSpec q;
  if (m.q0.size() == 2) {
    if (!(m.q0[1] > m.q0[0])) throw InvalidInput("certify: --q0 a b needs a < b");
    q.dim = 1;
    q.c1 = 0.5 * (m.q0[0] + m.q0[1]);
    q.half_side = 0.5 * (m.q0[1] - m.q0[0]);
  } else if (m.q0.size() == 3 || m.q0.size() == 4) {
    q.dim = 2;
    q.c1 = m.q0[0];
    q.c2 = m.q0[1];
    q.half_side = m.q0[2];
    q.phi = m.q0.size() == 4 ? m.q0[3] : 0.0;
  } else {
    throw InvalidInput("certify: --q0 takes 'a b' (d = 1) or 'c1 c2 h [phi]' (d = 2)");
  }
  const auto cert = dyadic_ancestry_certificate(f, q, m.op.alpha, q.dim, m.depth);
  json j = io::certificate_json(cert);
  j["manifest"] = m.to_json();
  io::write_text(out_path(m, "certificate.json"), io::dump(j));
  const auto text = io::certificate_text(cert);
  io::write_text(out_path(m, "certificate.txt"), text);
  std::fputs(text.c_str(), stdout);
  return kPass;
}

}  // namespace maxlab::cli
