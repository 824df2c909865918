#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "maxlab/maxops.hpp"
#include "maxlab/profile.hpp"

namespace maxlab {

enum class Region { kC, kDminus, kDzero, kDplus };

// Five derivative classes of the right lateral operator.
enum class DerivClass { kDplus, kDzero, kDRminus, kC, kCRminus };

inline constexpr std::size_t kNoNode = std::numeric_limits<std::size_t>::max();

struct SunriseComponent {
  double a = 0;
  double b = 0;
  bool a_cut = false;  // left end is the cutoff rho or a domain boundary
  bool b_cut = false;
  bool a_infinite = false;
  bool b_infinite = false;
  std::size_t first = 0;  // lateral indices of the first and last disconnecting node
  std::size_t last = 0;
  // Plateau of minima; on an unbounded side the plateau sits at infinity and the node indices
  // are kNoNode (tau_side = -1 or +1).
  double tau_minus = 0;
  double tau_plus = 0;
  std::size_t tau_minus_node = kNoNode;
  std::size_t tau_plus_node = kNoNode;
  int tau_side = 0;
  double min_value = 0;
};

struct SunriseDecomposition {
  Domain domain;
  double rho = 0;
  bool has_rho = false;
  double tol = 0;    // gap tolerance of the field
  double scale = 0;  // max f
  std::vector<std::size_t> node;  // grid index of each lateral node
  std::vector<double> t;          // lateral abscissae (circle: unwrapped, increasing)
  std::vector<double> f;
  std::vector<double> field;
  std::vector<double> right;
  std::vector<double> left;
  std::vector<Region> regions;
  std::vector<bool> in_DR;
  std::vector<bool> in_DL;
  std::vector<DerivClass> deriv_class;
  std::vector<SunriseComponent> components;
  std::size_t clamp_count = 0;  // nodes where the running maximum exceeded the field (noise)

  Profile lateral_R() const;
  Profile lateral_L() const;
};

// Whole-domain construction on the line and the circle (rho ignored); on the radial half-line
// the lateral nodes are those with t > rho, on the polar interval rho < t < pi - rho.
SunriseDecomposition sunrise_decompose(const Profile& f, const MaximalField& field, double rho);

struct SlopeViolation {
  std::size_t node = 0;  // left node of the offending cell
  double t = 0;
  double slope = 0;
  double allowed = 0;
  std::string rule;
};

struct DerivativeTable {
  std::vector<DerivClass> cls;
  std::vector<double> slope;  // slope of the right lateral operator on the cell to the right
  std::vector<SlopeViolation> violations;  // five-case table
  std::vector<SlopeViolation> monotonicity;  // lateral monotonicity, both sides
  std::size_t cells_checked = 0;
};

DerivativeTable lateral_derivative_table(const SunriseDecomposition& dec,
                                         double slope_tol_rel = 1e-6);

// Exact comparisons at every lateral node: f <= R, f <= L, R <= field, L <= field and
// max(R, L) == field.
struct SunriseIdentityReport {
  std::size_t nodes = 0;
  std::size_t below_f = 0;      // a lateral value under f
  std::size_t above_field = 0;  // a lateral value over the field
  std::size_t max_mismatch = 0;
  std::size_t first_bad = kNoNode;
  bool passed() const { return below_f == 0 && above_field == 0 && max_mismatch == 0; }
};

SunriseIdentityReport check_sunrise_identities(const SunriseDecomposition& dec);

Profile max_merge(const Profile& g, const Profile& h);

std::string region_name(Region r);
std::string deriv_class_name(DerivClass c);

}  // namespace maxlab
