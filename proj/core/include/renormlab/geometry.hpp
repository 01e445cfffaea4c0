#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace renormlab {

/// A point of R^m. Coordinates are dimensionless.
using Point = Eigen::VectorXd;

/// Builds a point from a coordinate list, e.g. `point({1.0, 0.0})`.
Point point(std::initializer_list<double> coords);

/// The scale-and-translate chart x -> scale * x + center used by every rescaling.
struct AffineChart {
  double scale = 1.0;
  Point center;

  AffineChart() = default;
  AffineChart(double s, Point c);

  static AffineChart identity(Eigen::Index dim);

  Eigen::Index dim() const { return center.size(); }
  Point apply(const Point& x) const { return scale * x + center; }

  /// The chart x -> this(inner(x)).
  AffineChart after(const AffineChart& inner) const;
};

/// The affine function x -> constant + <gradient, x>.
struct AffineFunc {
  double constant = 0.0;
  Eigen::VectorXd gradient;

  double operator()(const Point& x) const { return constant + gradient.dot(x); }
  bool nonconstant(double min_gradient = 0.0) const { return gradient.norm() > min_gradient; }
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  bool contains(double t) const { return lo <= t && t <= hi; }
};

/// Axis-aligned compact box; used wherever a compact set K is needed.
class Box {
public:
  Box() = default;
  explicit Box(std::vector<Interval> axes);

  /// The cube [lo, hi]^dim.
  static Box cube(Eigen::Index dim, double lo, double hi);
  /// The cube of half-side `half_width` centered at `center`.
  static Box around(const Point& center, double half_width);

  Eigen::Index dim() const { return static_cast<Eigen::Index>(axes_.size()); }
  const std::vector<Interval>& axes() const { return axes_; }
  const Interval& axis(Eigen::Index i) const { return axes_[static_cast<std::size_t>(i)]; }
  bool contains(const Point& x) const;
  bool contains(const Box& other) const;
  Point center() const;
  double max_side() const;

private:
  std::vector<Interval> axes_;
};

/// Tensor grid over a box with the same number of nodes on each axis.
class GridSpec {
public:
  GridSpec() = default;
  GridSpec(Box box, int points_per_axis);

  const Box& box() const { return box_; }
  int points_per_axis() const { return points_per_axis_; }
  Eigen::Index dim() const { return box_.dim(); }

  std::size_t size() const;
  double spacing(Eigen::Index axis) const;
  /// Node with flat index `flat`; the last axis varies fastest.
  Point node(std::size_t flat) const;
  std::vector<Point> nodes() const;

  /// Same box, twice the resolution (2n - 1 nodes per axis, nested).
  GridSpec refined() const;

private:
  Box box_;
  int points_per_axis_ = 2;
};

/// Euclidean distance.
double distance(const Point& a, const Point& b);

/// Lexicographic comparison of coordinates, used for deterministic tie-breaking.
bool lex_less(const Point& a, const Point& b);

}  // namespace renormlab
