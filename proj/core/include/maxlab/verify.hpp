#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "maxlab/kernels.hpp"
#include "maxlab/maxops.hpp"
#include "maxlab/profile.hpp"

namespace maxlab {

// ---------------------------------------------------------------------------------------------
// No strict local maximum inside the disconnecting set.

struct LocalMaxViolation {
  std::size_t node = 0;  // first node of the offending plateau
  double t = 0;
  double value = 0;
  double left_exit = 0;  // first values off the plateau on each side
  double right_exit = 0;
};

struct LocalMaxReport {
  double tol = 0;
  std::size_t runs = 0;  // disconnecting runs scanned
  std::size_t nodes = 0;
  std::vector<LocalMaxViolation> violations;
  bool passed() const { return violations.empty(); }
};

// A plateau of nodes (values within tol of each other) inside a disconnecting run is flagged when
// the values on both sides drop by more than tol. tol = tol_rel * max f.
LocalMaxReport check_no_strict_local_max(const MaximalField& field, double tol_rel = 1e-7);

// ---------------------------------------------------------------------------------------------
// Dyadic ancestry: the first dyadic descendant whose average exceeds the base cube's.

struct DyadicCertificate {
  double alpha = 0;
  int dim = 1;
  int k = 0;  // level of the larger descendant
  std::vector<CubeSpec> chain;  // Q_0 .. Q_k
  std::vector<double> averages;
  std::vector<bool> overlaps;  // alpha Q_i meets alpha Q_{i+1}, i < k
  double max_equal_deviation = 0;  // max |avg(Q_i) - avg(Q_0)| over i < k
  std::size_t cubes_visited = 0;

  bool all_overlap() const;
};

// Dilates of a cube and one of its dyadic children meet (relative tolerance 1e-9 of the side).
bool dyadic_overlap(const CubeSpec& parent, const CubeSpec& child, double alpha);
// Children in lexicographic order of their offset signs.
std::vector<CubeSpec> dyadic_children(const CubeSpec& q);

// Breadth-first search to the minimal level. Throws InvalidInput when f is constant on q0 and
// InvariantFailure when the depth cap or the cube budget is exhausted.
DyadicCertificate dyadic_ancestry_certificate(const Profile& f, const CubeSpec& q0, double alpha,
                                              int d, int depth_cap = 20,
                                              std::size_t max_cubes = std::size_t{1} << 20);

// ---------------------------------------------------------------------------------------------
// Flatness on the connecting set.

struct FlatNode {
  std::size_t node = 0;
  double t = 0;
  double slope = 0;
};

struct FlatSegment {
  double t0 = 0;
  double t1 = 0;
  double slope = 0;
  std::size_t connecting_nodes = 0;
  std::size_t nodes = 0;
};

struct FlatnessReport {
  std::vector<FlatNode> list_a;     // connecting nodes where f' is resolvably nonzero
  std::vector<FlatSegment> list_b;  // sloped segments of f that are not entirely disconnecting
  std::size_t nodes_checked = 0;
};

// A slope s at distance e from the nearest knot of f counts as resolvable when
// |s| > slope_tol_rel * max f and |s| * e > 10 * gap_tol (so a kink cannot hide behind the gap
// tolerance).
FlatnessReport check_flatness(const MaximalField& field, const Profile& f,
                              double slope_tol_rel = 1e-6);

// ---------------------------------------------------------------------------------------------
// Control of the derivative near the origin (radial half-line).

struct OriginRow {
  double eta = 0;
  double ell = 0;
  double lhs = 0;          // weighted L1 norm of the field slope on (0, eta)
  double rhs_local = 0;    // same for f on (0, ell * eta)
  double rhs_global = 0;   // ell^{-d} times the full norm of f'
  double rhs_point = 0;    // f(ell * eta) (ell * eta)^{d-1}
  double ratio = 0;        // lhs / sum of the three; 0 when lhs = 0
};

struct OriginReport {
  std::vector<OriginRow> rows;
  bool lhs_nonincreasing_as_eta_shrinks = true;
  double max_ratio = 0;
};

OriginRow origin_control(const Profile& f, const MaximalField& field, double eta, double ell);
OriginReport origin_control_sweep(const Profile& f, const MaximalField& field,
                                  const std::vector<double>& etas,
                                  const std::vector<double>& ells);

// ---------------------------------------------------------------------------------------------
// Continuity experiment.

struct ConvergenceRow {
  int j = 0;
  W11Distance w11;
  double sup_f = 0;      // max |f_j - f| over grid nodes with t >= delta
  double sup_field = 0;  // same for the maximal fields
  double deriv_distance = 0;  // weighted L1 distance of the field slopes
  double lateral_total = 0;   // weighted L1 distance of the right lateral slopes on the window
  double pieces[4] = {0, 0, 0, 0};  // C&C_j, D&C_j, C&D_j, D&D_j
  double additivity_residual = 0;
  double bl_j = 0;  // int over D of |R_j'| w
  double bl = 0;    // int over D of |R'| w
  double gamma_j = 0;
  double gamma = 0;
  double lambda = 0;
  double identity_residual = 0;  // max over f, f_j of the integration-by-parts residual
  double branch1_lhs = 0, branch1_rhs = 0;
  double branch2_lhs = 0, branch2_rhs = 0;
  bool branch1 = false;
  bool branch2 = false;
  int branch = 0;  // first branch that holds, 0 if neither
  // Same quantities with the gap tolerance multiplied by 10.
  double lateral_total_alt = 0;
  double lambda_alt = 0;
  std::size_t p1_violations = 0;  // strict local maxima found in the field of f_j
};

struct ConvergenceReport {
  std::string op;
  double alpha = 0;
  std::string domain;
  double rho = 0;
  double eta = 0;  // window start for the lateral integrals (radial/polar)
  std::size_t grid_size = 0;
  std::size_t cells = 0;
  std::size_t p1_violations_f = 0;
  std::vector<ConvergenceRow> rows;
  double max_additivity_residual = 0;
  double max_identity_residual = 0;
  bool distance_decreasing = false;
  bool lateral_decreasing = false;
  bool lambda_decreasing = false;
  bool branches_recorded = false;
  bool converged() const {
    return distance_decreasing && lateral_decreasing && lambda_decreasing && branches_recorded;
  }
};

// Trend test used for the verdicts: values at or below floor count as converged; otherwise the
// last value must be below first / factor with at most one increase along the way.
bool decreasing_trend(const std::vector<double>& xs, double floor, int allowed_inversions = 1,
                      double factor = 4.0);

// Grid shared by f and every f_j: make_grid(f, n) merged with the breakpoints of the sequence.
std::vector<double> experiment_grid(const Profile& f, const std::vector<Profile>& seq, int n);

ConvergenceReport continuity_experiment(const Profile& f, const std::vector<Profile>& seq,
                                        const OperatorSpec& op, double rho,
                                        const std::vector<double>& grid, int threads = 0);

// ---------------------------------------------------------------------------------------------
// Boundedness diagnostics.

struct BoundReport {
  double field_norm = 0;  // variation (line, circle) or weighted L1 norm of the field slope
  double f_norm = 0;
  double ratio = 0;
  bool degenerate = false;  // both norms vanish
  double decay_low = 0;     // w * Mf at the first and last grid node
  double decay_high = 0;
  double weak_type = 0;  // sup over lambda of lambda |{Mf >= lambda}|_w / ||f||_1
};

// Line variation includes the two tails down to zero outside the grid.
double field_variation(const MaximalField& field);
BoundReport bound_suite(const Profile& f, const MaximalField& field);

}  // namespace maxlab
