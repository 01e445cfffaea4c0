#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "renormlab/geometry.hpp"
#include "renormlab/sexpr.hpp"

namespace renormlab {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Boundary curve y = h(x) from a small closed-form library.
struct Curve {
  enum class Kind { Constant, Linear, ExpAbs, Hyperbola, Parabola };
  Kind kind = Kind::Constant;
  double p0 = 0.0;
  double p1 = 0.0;

  static Curve constant(double c) { return {Kind::Constant, c, 0.0}; }
  static Curve linear(double m, double c) { return {Kind::Linear, m, c}; }
  /// s * exp(-|x|) + t
  static Curve exp_abs(double s, double t) { return {Kind::ExpAbs, s, t}; }
  /// c / x, defined for x > 0 only
  static Curve hyperbola(double c) { return {Kind::Hyperbola, c, 0.0}; }
  /// a x^2 + b
  static Curve parabola(double a, double b) { return {Kind::Parabola, a, b}; }

  bool defined_at(double x) const { return kind != Kind::Hyperbola || x > 0.0; }
  double operator()(double x) const;
  Curve negated() const;

  std::string to_string() const;
  static Curve from_sexpr(const SExpr& e);
};

/// Finite union of disjoint open intervals, sorted; endpoints may be infinite.
struct SliceSet {
  struct Span {
    double lo;
    double hi;
  };
  std::vector<Span> spans;
  /// Set when an endpoint came from bisection rather than a closed form.
  bool approximate = false;

  bool contains(double s) const;
  bool empty() const { return spans.empty(); }
  /// True iff the closed interval [lo, hi] lies in one span.
  bool covers(double lo, double hi) const;

  static SliceSet all();
  static SliceSet none() { return {}; }
  static SliceSet interval(double lo, double hi);
  SliceSet united(const SliceSet& other) const;
  SliceSet intersected(const SliceSet& other) const;
};

/// Offsets c of the parallel lines {x : <n, x> = c}, n = (-v_2, v_1), that
/// lie entirely in a domain, for one direction v. Intervals carry closedness.
struct OffsetSet {
  struct Range {
    double lo;
    double hi;
    bool lo_closed;
    bool hi_closed;
    bool empty() const;
    double pick() const;  ///< a member of the range
  };
  std::vector<Range> ranges;
  /// False when the set is only known to be a subset of the true one (unions).
  bool exact = true;

  static OffsetSet all();
  static OffsetSet none() { return {}; }
  bool empty() const;
  OffsetSet intersected(const OffsetSet& o) const;
  OffsetSet united(const OffsetSet& o) const;
  OffsetSet mapped(double k, double b) const;  ///< c -> k c + b, k != 0
};

struct Line {
  Vec2 origin;
  Vec2 dir;
};

/// Line directions along which a domain may contain whole lines.
struct DirectionSet {
  std::vector<Vec2> dirs;
  bool continuum = false;  ///< a continuum of directions may qualify
};

/// Open subset of R^2 built from half-planes, curve regions y < h(x) and
/// y > h(x), vertical strips, unions, intersections and invertible affine
/// images. Membership is exact; slices along lines are closed-form except
/// for exp-type curves cut by slanted lines (bisection, flagged approximate).
///
/// Text form:
///   (halfplane A B C)      a x + b y + c > 0
///   (below CURVE) (above CURVE) (vstrip X0 X1)
///   (union D ...) (inter D ...) (affine (M11 M12 M21 M22) (T1 T2) D)
/// Curves: (const C) (linear M C) (expabs S T) (hyperbola C) (parabola A B).
/// A bare identifier names a catalog domain.
class DomainExpr {
public:
  DomainExpr() = delete;

  static DomainExpr half_plane(double a, double b, double c);
  static DomainExpr below(const Curve& h);
  static DomainExpr above(const Curve& h);
  static DomainExpr vertical_strip(double x0, double x1);
  static DomainExpr unite(std::vector<DomainExpr> parts);
  static DomainExpr intersect(std::vector<DomainExpr> parts);
  /// {M x + t : x in d}; throws PreconditionError unless M is invertible.
  static DomainExpr affine_image(const Mat2& M, const Vec2& t, const DomainExpr& d);

  bool contains(const Vec2& p) const;
  bool contains(const Point& p) const;

  /// {s : origin + s dir in d}; dir need not be unit.
  SliceSet line_slice(const Vec2& origin, const Vec2& dir) const;
  SliceSet horizontal_slice(double b) const;
  SliceSet vertical_slice(double x) const;

  /// sup over d of <u, x>; +inf when unbounded.
  double support(const Vec2& u) const;
  /// Unit vectors u for which the support may be finite.
  std::vector<Vec2> candidate_normals() const;
  /// Lines carried by boundary pieces and asymptotes.
  std::vector<Line> boundary_lines() const;
  DirectionSet line_directions() const;
  OffsetSet line_offsets(const Vec2& v) const;
  /// True when the tree has no union node.
  bool union_free() const;

  std::string to_string() const;
  static DomainExpr parse(std::string_view text);
  static DomainExpr from_sexpr(const SExpr& e);

  struct Node;

private:
  explicit DomainExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace renormlab
