#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

namespace maxlab {

enum class DomainKind { kLine, kRadialHalfLine, kCircle, kPolarInterval };

// One-dimensional domain together with its integration weight:
//   line 1, radial half-line t^{d-1}, circle 1 (arclength), polar interval sin(t)^{d-1}.
struct Domain {
  DomainKind kind = DomainKind::kLine;
  int dim = 1;

  static Domain line() { return {DomainKind::kLine, 1}; }
  static Domain radial(int d);
  static Domain circle() { return {DomainKind::kCircle, 1}; }
  static Domain polar(int d);

  bool periodic() const { return kind == DomainKind::kCircle; }
  bool weighted() const {
    return kind == DomainKind::kRadialHalfLine || kind == DomainKind::kPolarInterval;
  }

  double weight(double t) const;
  double weight_derivative(double t) const;

  // Integral of the linear function through (a, va), (b, vb) against w on [a, b].
  double integrate_linear(double a, double b, double va, double vb) const;
  // Same against w'.
  double integrate_linear_dw(double a, double b, double va, double vb) const;
  double weight_integral(double a, double b) const { return integrate_linear(a, b, 1.0, 1.0); }

  // Surface measure of the unit sphere S^{d-1} for radial and polar domains, 1 otherwise.
  double surface_constant() const;

  // "line", "radial:3", "circle", "polar:2".
  std::string name() const;

  bool operator==(const Domain&) const = default;
};

// Surface measure of the unit sphere S^n in R^{n+1}; sphere_area(0) = 2.
double sphere_area(int n);

// Parses the CLI spelling produced by Domain::name().
Domain parse_domain(const std::string& text);

struct Sample {
  double t;
  double v;
};

// Continuous piecewise-linear function on a Domain.
//
// The supplied breakpoints are kept as given (circle angles wrapped into [0, 2pi)). Internally the
// profile also stores an extended knot list covering the whole representable range: a zero
// extension on the line, the left plateau on the radial half-line, the closing segment on the
// circle and the end plateaus on the polar interval.
class Profile {
 public:
  Profile() = default;

  // Profile defined only on [t.front(), t.back()] with no boundary rule; used for lateral
  // operators and restrictions. Evaluating outside the window throws.
  static Profile window(Domain domain, std::vector<double> t, std::vector<double> v);

  const Domain& domain() const { return domain_; }
  const std::vector<double>& breakpoints() const { return t_; }
  const std::vector<double>& values() const { return v_; }
  bool nonnegative() const { return nonnegative_; }
  bool windowed() const { return windowed_; }

  const std::vector<double>& knots() const { return kt_; }
  const std::vector<double>& knot_values() const { return kv_; }

  // Closure of the region where f may be nonzero (line and radial), else the knot range.
  double support_lower() const;
  double support_upper() const;

  double operator()(double t) const;
  // One-sided slopes; at a knot they belong to the adjacent segments.
  double slope_right(double t) const;
  double slope_left(double t) const;

  // Unweighted integral over [a, b], a <= b. Circle arcs may wrap any number of times.
  double integral(double a, double b) const;

  double max_value() const;
  double min_value() const;
  double max_abs() const;

 private:
  friend Profile build_profile(std::vector<Sample> samples, Domain domain);
  friend Profile make_profile_unchecked(Domain domain, std::vector<double> t,
                                        std::vector<double> v, bool windowed);

  void finalize();
  // Index k with kt_[k] <= t <= kt_[k+1] for t inside [kt_.front(), kt_.back()].
  std::size_t segment_of(double t) const;
  double eval_inside(double t) const;
  double wrap(double t) const;
  double primitive_inside(double a, double b) const;

  Domain domain_;
  std::vector<double> t_, v_;
  std::vector<double> kt_, kv_;
  std::vector<double> cum_;
  bool nonnegative_ = false;
  bool windowed_ = false;
};

Profile build_profile(std::vector<Sample> samples, Domain domain);
Profile build_profile(const std::vector<double>& t, const std::vector<double>& v, Domain domain);

// Weighted L1 norm of f' (with the sphere constant on radial and polar domains).
double weighted_derivative_l1(const Profile& f);
// Same, restricted to [a, b].
double weighted_derivative_l1(const Profile& f, double a, double b);
// Weighted L1 norm of f (same constant convention).
double weighted_l1(const Profile& f);

double variation(const Profile& f);
// Variation of the restriction of f to [a, b].
double variation(const Profile& f, double a, double b);
double variation(std::span<const double> values);

// |f| with zero crossings inserted as breakpoints.
Profile abs_reduce(const Profile& f);

// a*f + b*g on the common refinement.
Profile combine(double a, const Profile& f, double b, const Profile& g);
// Pointwise maximum on the common refinement with crossings inserted.
Profile pointwise_max(const Profile& f, const Profile& g);

struct W11Distance {
  double l1 = 0;
  double deriv_l1 = 0;
  double sup_tail = 0;
};
W11Distance w11_distance(const Profile& f, const Profile& g, double delta = 0.01);

struct BoundaryDecay {
  double at_zero = 0;
  double at_infinity = 0;
};
BoundaryDecay boundary_decay(const Profile& f);

// Sorted abscissae where both profiles are linear in between, spanning the union of their
// ranges (circle: [0, 2pi]; radial: from 0; polar: [0, pi]).
std::vector<double> common_refinement(const Profile& f, const Profile& g);

std::vector<double> sample(const Profile& f, std::span<const double> at);

}  // namespace maxlab
