#include "renormlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "renormlab/errors.hpp"

namespace renormlab {

Point point(std::initializer_list<double> coords) {
  Point p(static_cast<Eigen::Index>(coords.size()));
  Eigen::Index i = 0;
  for (double c : coords) p[i++] = c;
  return p;
}

AffineChart::AffineChart(double s, Point c) : scale(s), center(std::move(c)) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw PreconditionError("affine chart scale must be positive and finite");
  }
  if (!center.allFinite()) throw PreconditionError("affine chart center must be finite");
}

AffineChart AffineChart::identity(Eigen::Index dim) { return {1.0, Point::Zero(dim)}; }

AffineChart AffineChart::after(const AffineChart& inner) const {
  if (inner.dim() != dim()) throw DimensionError("chart composition: dimension mismatch");
  return {scale * inner.scale, scale * inner.center + center};
}

Box::Box(std::vector<Interval> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw PreconditionError("box needs at least one axis");
  for (const auto& a : axes_) {
    if (!(a.lo <= a.hi) || !std::isfinite(a.lo) || !std::isfinite(a.hi)) {
      throw PreconditionError("box axis must satisfy lo <= hi with finite endpoints");
    }
  }
}

Box Box::cube(Eigen::Index dim, double lo, double hi) {
  return Box(std::vector<Interval>(static_cast<std::size_t>(dim), Interval{lo, hi}));
}

Box Box::around(const Point& center, double half_width) {
  std::vector<Interval> axes;
  axes.reserve(static_cast<std::size_t>(center.size()));
  for (Eigen::Index i = 0; i < center.size(); ++i) {
    axes.push_back({center[i] - half_width, center[i] + half_width});
  }
  return Box(std::move(axes));
}

bool Box::contains(const Point& x) const {
  if (x.size() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (!axis(i).contains(x[i])) return false;
  }
  return true;
}

bool Box::contains(const Box& other) const {
  if (other.dim() != dim()) return false;
  for (Eigen::Index i = 0; i < dim(); ++i) {
    if (other.axis(i).lo < axis(i).lo || other.axis(i).hi > axis(i).hi) return false;
  }
  return true;
}

Point Box::center() const {
  Point c(dim());
  for (Eigen::Index i = 0; i < dim(); ++i) c[i] = 0.5 * (axis(i).lo + axis(i).hi);
  return c;
}

double Box::max_side() const {
  double s = 0.0;
  for (const auto& a : axes_) s = std::max(s, a.width());
  return s;
}

GridSpec::GridSpec(Box box, int points_per_axis)
    : box_(std::move(box)), points_per_axis_(points_per_axis) {
  if (points_per_axis_ < 2) throw PreconditionError("grid needs at least 2 points per axis");
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (Eigen::Index i = 0; i < dim(); ++i) n *= static_cast<std::size_t>(points_per_axis_);
  return n;
}

double GridSpec::spacing(Eigen::Index axis) const {
  return box_.axis(axis).width() / static_cast<double>(points_per_axis_ - 1);
}

Point GridSpec::node(std::size_t flat) const {
  Point x(dim());
  const auto n = static_cast<std::size_t>(points_per_axis_);
  for (Eigen::Index i = dim() - 1; i >= 0; --i) {
    const auto k = flat % n;
    flat /= n;
    const auto& a = box_.axis(i);
    // Centered form keeps grids over symmetric boxes exactly symmetric.
    if (k == 0) {
      x[i] = a.lo;
    } else if (k == n - 1) {
      x[i] = a.hi;
    } else {
      const double c = 0.5 * (a.lo + a.hi);
      const double half = 0.5 * a.width();
      const double t = static_cast<double>(2 * static_cast<long>(k) - static_cast<long>(n - 1)) /
                       static_cast<double>(n - 1);
      x[i] = c + half * t;
    }
  }
  return x;
}

std::vector<Point> GridSpec::nodes() const {
  std::vector<Point> out;
  out.reserve(size());
  for (std::size_t k = 0; k < size(); ++k) out.push_back(node(k));
  return out;
}

GridSpec GridSpec::refined() const { return {box_, 2 * points_per_axis_ - 1}; }

double distance(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw DimensionError("distance: dimension mismatch");
  return (a - b).norm();
}

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

}  // namespace renormlab
