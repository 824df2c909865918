#pragma once

#include <string>
#include <variant>
#include <vector>

#include "maxlab/kernels.hpp"
#include "maxlab/profile.hpp"

namespace maxlab {

enum class OperatorKind {
  kUncenteredHL,
  kCenteredHL,
  kNonTangentialCube,
  kHeatFlow,
  kPoissonFlow,
  kSphereUncentered,
};

struct SearchConfig {
  // Coarse nodes per search parameter; empty uses the family defaults, a single entry applies
  // to every parameter.
  std::vector<int> coarse_grid;
  double refine_tol = 1e-10;
  // Upper bound on radius / half-side; 0 derives the certified bound from ||f||_1.
  double scale_cap = 0;
  double time_cap = 1e4;
  int restarts = 5;
};

struct OperatorSpec {
  OperatorKind kind = OperatorKind::kUncenteredHL;
  double alpha = 0;
  SearchConfig search;
};

// [a, b] on the line or circle, or a radial ball / polar cap written as its diameter along the
// axis through the evaluation point: centre (a+b)/2 (signed), radius (b-a)/2.
struct IntervalWitness {
  double a = 0;
  double b = 0;
};

using Witness = std::variant<IntervalWitness, CubeSpec, ParabolicPoint>;

enum class NodeLabel { kConnecting, kDisconnecting };
enum class DerivMethod { kNone, kWitness, kFiniteDifference, kConnecting, kUnavailable };

struct MaximalField {
  OperatorSpec op;
  Profile f;
  std::vector<double> grid;
  std::vector<double> values;
  std::vector<Witness> witnesses;
  std::vector<double> scale_caps;  // certified search bound used at each node
  std::vector<double> deriv;
  std::vector<DerivMethod> deriv_method;
  std::vector<NodeLabel> labels;
  std::vector<double> gap;
  double gap_tol = 0;

  std::size_t size() const { return grid.size(); }
  double f_at(std::size_t i) const { return values[i] - gap[i]; }
};

struct NodeResult {
  double value = 0;
  Witness witness;
  double scale_cap = 0;
};

std::string operator_name(OperatorKind kind);
OperatorKind parse_operator(const std::string& name);

// Throws Unsupported when the operator is not defined on the domain.
void check_supported(const OperatorSpec& op, const Domain& domain);

// Average of |f| over the witness set (heat/Poisson: the flow value).
double witness_average(const OperatorSpec& op, const Profile& f, const Witness& w);
double witness_scale(const Witness& w);

// Global maximisation of the admissible averages at one point.
NodeResult maximize_at(const OperatorSpec& op, const Profile& f, double x);

double default_gap_tol(const Profile& f);

// Uniform grid over the natural range of f (see README), merged with the knots of f unless
// include_knots is false. Nodes closer than 1e-3 of the spacing to a knot are dropped.
std::vector<double> make_grid(const Profile& f, int n, bool include_knots = true);

// threads = 0 uses the hardware concurrency. Results do not depend on the thread count.
MaximalField evaluate(const OperatorSpec& op, const Profile& f, std::vector<double> grid,
                      int threads = 0);

void relabel(MaximalField& field, double tol);

MaximalField field_derivative(MaximalField field);

struct DisconnectingInterval {
  double a = 0;
  double b = 0;
  std::size_t first = 0;  // first and last disconnecting node
  std::size_t last = 0;
  bool a_unbounded = false;  // run reaches the grid end on an unbounded side
  bool b_unbounded = false;
};

// Maximal runs of nodes with gap > tol. With refine, endpoints are located by bisection on the
// gap function; otherwise they are the bracketing connecting nodes. On the circle a run through
// the seam is reported once with a < 0.
std::vector<DisconnectingInterval> classify_regions(const MaximalField& field, double tol,
                                                    bool refine = true);

}  // namespace maxlab
