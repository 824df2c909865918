#pragma once

#include "maxlab/profile.hpp"

namespace maxlab {

// Cube [c1-h, c1+h] in d = 1; in d = 2 a square of half-side h centred at (c1, c2), rotated by
// phi. The profile is read as a radial function on the plane.
struct CubeSpec {
  int dim = 1;
  double c1 = 0;
  double c2 = 0;
  double half_side = 1;
  double phi = 0;
};

enum class KernelKind { kHeat, kPoisson };

// Evaluation point of a flow. On the line `y` is the signed position; on the radial half-line
// only |y| matters. `t` is the heat time or the Poisson height.
struct ParabolicPoint {
  double y = 0;
  double t = 1;
};

double interval_average(const Profile& f, double a, double b);

// Measure of the sphere {|y| = r} inside the ball of radius s whose centre is at distance rho_c
// from the origin, in R^d.
double slice_weight(int d, double r, double rho_c, double s);

// Average of the radial function f over the ball B_s(z), |z| = rho_c. s = 0 returns f(rho_c).
double ball_average_radial(const Profile& f, double rho_c, double s);

// Radial component at the evaluation direction of the averaged gradient over B_s(z), where
// z = center * e and e is the unit vector toward the evaluation point (center may be negative).
double ball_gradient_radial(const Profile& f, double center, double s);

// Cube average. d = 2 is exact: the square splits into triangles with a vertex at the origin and
// the moments of r^0 and r^1 over each triangle cut by a disc have closed forms.
double cube_average(const Profile& f, const CubeSpec& q);
// d = 2 reduction to one dimension in |y| (arc length of circles inside the square) with fixed
// Gauss-Legendre on smooth pieces; kept as an independent reference.
double cube_average_slices(const Profile& f, const CubeSpec& q);
// Tensor-product Gauss-Legendre over the square (nodes per axis); kept as a reference.
double cube_average_tensor(const Profile& f, const CubeSpec& q, int nodes = 64);

double heat_kernel(int d, double r, double t);
double poisson_kernel(int d, double r, double t);

// (f * K_t)(y) for the heat or Poisson kernel in dimension d (1 on the line).
double angular_kernel_average(const Profile& f, KernelKind kernel, ParabolicPoint p);

// Average over the geodesic ball of radius s centred at polar angle theta_c: S^1 (circle
// profile, any real theta_c) or S^2 (polar profile with dim 2, theta_c in [0, pi]).
double geodesic_ball_average(const Profile& f, double theta_c, double s);

}  // namespace maxlab
