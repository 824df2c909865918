#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "maxlab/maxops.hpp"
#include "maxlab/profile.hpp"

namespace maxlab::cli {

// Everything that determines a run. Thread count and the output directory are kept out of
// to_json() so reports do not depend on them.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> sequence;
  std::string perturbation;
  int count = 16;
  std::string domain_text = "line";
  std::string op_text = "uncentered";
  OperatorSpec op;
  int grid = 2048;
  double rho = 0.05;
  double tol = 0;  // gap tolerance; 0 keeps the default
  double slope_tol = 1e-6;
  std::uint64_t seed = 0;
  int corpus = 0;
  std::string suite = "p1";
  std::vector<double> q0;
  int depth = 20;
  std::string out = ".";
  int threads = 0;

  Domain domain() const { return parse_domain(domain_text); }
  nlohmann::json to_json() const;
};

// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kInvariant = 1;
inline constexpr int kIo = 2;
inline constexpr int kUnsupported = 3;

int cmd_eval(const RunManifest& m);
int cmd_sunrise(const RunManifest& m);
int cmd_verify(const RunManifest& m);
int cmd_converge(const RunManifest& m);
int cmd_certify(const RunManifest& m);

}  // namespace maxlab::cli
