#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "manifest.hpp"
#include "maxlab/errors.hpp"

using namespace maxlab;
using namespace maxlab::cli;

namespace {

void common_flags(CLI::App* sub, RunManifest& m) {
  sub->add_option("--op", m.op_text, "uncentered|centered|cube|heat|poisson|sphere")
      ->capture_default_str();
  sub->add_option("--alpha", m.op.alpha, "aperture (cube, heat, poisson, certify)");
  sub->add_option("--domain", m.domain_text, "line|radial:D|circle|polar:D")->capture_default_str();
  sub->add_option("--grid", m.grid, "uniform grid size before merging knots")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sub->add_option("--tol", m.tol, "gap tolerance for the connecting/disconnecting split (0: default)");
  sub->add_option("--slope-tol", m.slope_tol, "relative slope tolerance")->capture_default_str();
  sub->add_option("--out", m.out, "output directory")->capture_default_str();
  sub->add_option("--threads", m.threads, "worker threads (0: all cores)")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"maxlab: maximal functions of piecewise-linear profiles"};
  app.require_subcommand(1);
  RunManifest m;

  std::map<std::string, std::function<int(const RunManifest&)>> handlers{
      {"eval", cmd_eval},         {"sunrise", cmd_sunrise}, {"verify", cmd_verify},
      {"converge", cmd_converge}, {"certify", cmd_certify},
  };

  auto* eval = app.add_subcommand("eval", "evaluate the maximal field on a grid");
  common_flags(eval, m);
  eval->add_option("--in", m.inputs, "profile CSV")->required()->expected(1);

  auto* sun = app.add_subcommand("sunrise", "lateral decomposition and derivative table");
  common_flags(sun, m);
  sun->add_option("--in", m.inputs, "profile CSV")->required()->expected(1);
  sun->add_option("--rho", m.rho, "cutoff on radial and polar domains")->capture_default_str();

  auto* ver = app.add_subcommand("verify", "run a verification suite over profiles");
  common_flags(ver, m);
  ver->add_option("--suite", m.suite, "p1|flatness|sunrise|bound|origin|all")
      ->capture_default_str()
      ->check(CLI::IsMember({"p1", "flatness", "sunrise", "bound", "origin", "all"}));
  ver->add_option("--in", m.inputs, "profile CSV files");
  ver->add_option("--corpus", m.corpus, "number of seeded random profiles")->capture_default_str();
  ver->add_option("--seed", m.seed, "corpus seed")->capture_default_str();
  ver->add_option("--rho", m.rho, "cutoff on radial and polar domains")->capture_default_str();

  auto* conv = app.add_subcommand("converge", "continuity experiment for a sequence f_j -> f");
  common_flags(conv, m);
  conv->add_option("--in", m.inputs, "limit profile CSV")->required()->expected(1);
  conv->add_option("--seq", m.sequence, "sequence profile CSVs, in order");
  conv->add_option("--perturb", m.perturbation, "g for the sequence f + g / j");
  conv->add_option("--count", m.count, "sequence length with --perturb")->capture_default_str();
  conv->add_option("--rho", m.rho, "cutoff on radial and polar domains")->capture_default_str();

  auto* cert = app.add_subcommand("certify", "dyadic ancestry certificate");
  common_flags(cert, m);
  cert->add_option("--in", m.inputs, "profile CSV")->required()->expected(1);
  cert->add_option("--q0", m.q0, "base cube: 'a b' (d = 1) or 'c1 c2 h [phi]' (d = 2)")
      ->required()
      ->expected(2, 4)
      ->allow_extra_args(false);
  cert->add_option("--depth", m.depth, "maximal dyadic level")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kPass : kIo;
  }

  auto* chosen = app.get_subcommands().front();
  m.command = chosen->get_name();
  try {
    m.op.kind = parse_operator(m.op_text);
    return handlers.at(m.command)(m);
  } catch (const InvariantFailure& e) {
    fmt::print(stderr, "maxlab {}: invariant failure: {}\n", m.command, e.what());
    return kInvariant;
  } catch (const Unsupported& e) {
    fmt::print(stderr, "maxlab {}: unsupported: {}\n", m.command, e.what());
    return kUnsupported;
  } catch (const IoError& e) {
    fmt::print(stderr, "maxlab {}: i/o error: {}\n", m.command, e.what());
    return kIo;
  } catch (const InvalidInput& e) {
    fmt::print(stderr, "maxlab {}: invalid input: {}\n", m.command, e.what());
    return kIo;
  } catch (const std::exception& e) {
    fmt::print(stderr, "maxlab {}: {}\n", m.command, e.what());
    return kIo;
  }
}
