#pragma once

#include <functional>
#include <vector>

namespace maxlab::search {

// Objective over a box; return -infinity for infeasible points.
using Objective = std::function<double(const std::vector<double>&)>;

struct Point {
  std::vector<double> x;
  double value = 0;
};

struct Box {
  std::vector<double> lo;
  std::vector<double> hi;
  std::size_t dims() const { return lo.size(); }
};

// Golden-section maximisation of g on [a, b]; also compares the endpoints and `hint`.
// Returns the best abscissa seen and its value.
std::pair<double, double> golden_max(const std::function<double(double)>& g, double a, double b,
                                     double tol, double hint);

// Tensor scan with counts[k] nodes per axis (endpoints included). Returns the `keep` best
// points, best first; ties keep scan order.
std::vector<Point> coarse_scan(const Objective& f, const Box& box, const std::vector<int>& counts,
                               int keep);

// Cyclic coordinate ascent with golden-section line searches. `step` is the initial half-width
// of each line-search bracket; stops when a sweep moves every coordinate less than tol times
// the box width.
Point coordinate_ascent(const Objective& f, const Box& box, Point start, std::vector<double> step,
                        double tol, int max_sweeps = 60);

// Coarse scan followed by coordinate ascent from the best `restarts` scan points.
// Returns all refined candidates, best first.
std::vector<Point> maximize(const Objective& f, const Box& box, const std::vector<int>& counts,
                            int restarts, double tol);

}  // namespace maxlab::search
