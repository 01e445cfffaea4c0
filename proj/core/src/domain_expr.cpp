#include "renormlab/domain_expr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include <Eigen/LU>

#include "renormlab/errors.hpp"
#include "renormlab/library.hpp"

namespace renormlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kParallelTol = 1e-12;

Vec2 refl(const Vec2& v) { return {v.x(), -v.y()}; }

// {s : a s^2 + b s + c > 0}
SliceSet quadratic_positive(double a, double b, double c) {
  if (a == 0.0) {
    if (b > 0.0) return SliceSet::interval(-c / b, kInf);
    if (b < 0.0) return SliceSet::interval(-kInf, -c / b);
    return c > 0.0 ? SliceSet::all() : SliceSet::none();
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return a > 0.0 ? SliceSet::all() : SliceSet::none();
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
  double r1 = q / a;
  double r2 = q != 0.0 ? c / q : r1;
  if (r1 > r2) std::swap(r1, r2);
  if (a > 0.0) {
    SliceSet out;
    out.spans.push_back({-kInf, r1});
    out.spans.push_back({r2, kInf});
    return out;
  }
  return r1 < r2 ? SliceSet::interval(r1, r2) : SliceSet::none();
}

// {s : k s + c > 0}
SliceSet linear_positive(double k, double c) { return quadratic_positive(0.0, k, c); }

// x-set -> s-set for x = o + s v, v != 0.
SliceSet pull_back(const SliceSet& xs, double o, double v) {
  SliceSet out;
  out.approximate = xs.approximate;
  for (const auto& sp : xs.spans) {
    double a = (sp.lo - o) / v;
    double b = (sp.hi - o) / v;
    if (a > b) std::swap(a, b);
    if (a < b) out.spans.push_back({a, b});
  }
  std::sort(out.spans.begin(), out.spans.end(), [](const auto& l, const auto& r) { return l.lo < r.lo; });
  return out;
}

// {x : s e^{-|x|} > y - t}, closed form.
SliceSet expabs_horizontal(double s, double t, double y) {
  const double rhs = y - t;
  if (s == 0.0) return rhs < 0.0 ? SliceSet::all() : SliceSet::none();
  const double r = rhs / s;
  if (s > 0.0) {
    if (r <= 0.0) return SliceSet::all();
    if (r >= 1.0) return SliceSet::none();
    const double L = -std::log(r);
    return SliceSet::interval(-L, L);
  }
  // s < 0: e^{-|x|} < r
  if (r > 1.0) return SliceSet::all();
  if (r <= 0.0) return SliceSet::none();
  const double L = -std::log(r);
  SliceSet out;
  out.spans.push_back({-kInf, -L});
  out.spans.push_back({L, kInf});
  return out;
}

// Positive set of a function with a known finite list of monotone pieces.
template <class F>
SliceSet positive_set_monotone(const F& f, std::vector<double> cuts) {
  // cuts: sorted breakpoints including -inf and +inf; f monotone between.
  SliceSet out;
  out.approximate = true;
  std::vector<double> pts;
  auto finite_probe = [&](double lo, double hi) {
    if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
    if (std::isfinite(lo)) return lo + 1.0 + std::abs(lo);
    if (std::isfinite(hi)) return hi - 1.0 - std::abs(hi);
    return 0.0;
  };
  auto sign_at = [&](double s) { return f(s) > 0.0; };
  // Refine each monotone piece with at most one root.
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double lo = cuts[i], hi = cuts[i + 1];
    if (!(lo < hi)) continue;
    pts.push_back(lo);
    // Bracket infinite ends by doubling.
    double a = std::isfinite(lo) ? lo : finite_probe(lo, hi);
    double b = std::isfinite(hi) ? hi : finite_probe(lo, hi);
    if (!std::isfinite(lo)) {
      double w = 1.0;
      a = b - w;
      while (sign_at(a) == sign_at(b) && std::isfinite(a - w) && w < 1e300) {
        w *= 2.0;
        a = b - w;
      }
      if (sign_at(a) == sign_at(b)) continue;
    }
    if (!std::isfinite(hi)) {
      double w = 1.0;
      b = a + w;
      while (sign_at(a) == sign_at(b) && w < 1e300) {
        w *= 2.0;
        b = a + w;
      }
      if (sign_at(a) == sign_at(b)) continue;
    }
    if (sign_at(a) == sign_at(b)) continue;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      (sign_at(mid) == sign_at(a) ? a : b) = mid;
    }
    pts.push_back(0.5 * (a + b));
  }
  pts.push_back(cuts.back());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    if (f(finite_probe(lo, hi)) > 0.0) {
      if (!out.spans.empty() && out.spans.back().hi == lo && f(lo) > 0.0) {
        out.spans.back().hi = hi;
      } else {
        out.spans.push_back({lo, hi});
      }
    }
  }
  return out;
}

// {s : S e^{-|x(s)|} + T - y(s) > 0} for the line (o, v), v_1 != 0, v_2 != 0.
SliceSet expabs_slanted(double S, double T, const Vec2& o, const Vec2& v) {
  SliceSet total;
  for (int sigma : {1, -1}) {
    // piece where sigma * x(s) >= 0
    const double s0 = -o.x() / v.x();
    double lo = -kInf, hi = kInf;
    if (sigma * v.x() > 0.0) lo = s0; else hi = s0;
    const double u = sigma * v.x();
    auto F = [&](double s) {
      const double ex = -sigma * o.x() - u * s;
      const double e = S * std::exp(ex);
      return e + (T - o.y()) - v.y() * s;
    };
    std::vector<double> cuts{lo};
    if (S != 0.0) {
      const double ratio = -v.y() / (S * u);
      if (ratio > 0.0) {
        const double sc = (-sigma * o.x() - std::log(ratio)) / u;
        if (sc > lo && sc < hi) cuts.push_back(sc);
      }
    }
    cuts.push_back(hi);
    SliceSet piece = positive_set_monotone(F, cuts);
    // Keep the piece boundary open/closed consistently with |x|: both halves
    // include x = 0, so join them afterwards.
    total = total.united(piece);
    total.approximate = true;
  }
  // Merge spans touching at the split point where the function is positive.
  SliceSet merged;
  merged.approximate = true;
  for (const auto& sp : total.spans) {
    if (!merged.spans.empty() && merged.spans.back().hi >= sp.lo) {
      const double at = sp.lo;
      const double x = o.x() + at * v.x(), y = o.y() + at * v.y();
      if (merged.spans.back().hi > sp.lo || S * std::exp(-std::abs(x)) + T - y > 0.0) {
        merged.spans.back().hi = std::max(merged.spans.back().hi, sp.hi);
        continue;
      }
    }
    merged.spans.push_back(sp);
  }
  return merged;
}

double curve_sup_below(const Curve& h, const Vec2& u) {
  // sup of u1 x + u2 y over {y < h(x)}
  const double u1 = u.x(), u2 = u.y();
  if (u2 < 0.0) return kInf;
  if (u2 == 0.0) {
    if (u1 == 0.0) return 0.0;
    if (h.kind == Curve::Kind::Hyperbola && u1 < 0.0) return 0.0;
    return kInf;
  }
  switch (h.kind) {
    case Curve::Kind::Constant:
      return u1 == 0.0 ? u2 * h.p0 : kInf;
    case Curve::Kind::Linear:
      return u1 + u2 * h.p0 == 0.0 ? u2 * h.p1 : kInf;
    case Curve::Kind::ExpAbs:
      return u1 == 0.0 ? u2 * (h.p1 + std::max(h.p0, 0.0)) : kInf;
    case Curve::Kind::Hyperbola: {
      const double c = h.p0;
      if (c > 0.0 || u1 > 0.0) return kInf;
      if (c == 0.0 || u1 == 0.0) return 0.0;
      return -2.0 * std::sqrt(u1 * u2 * c);
    }
    case Curve::Kind::Parabola: {
      const double a = h.p0, b = h.p1;
      if (a > 0.0) return kInf;
      if (a == 0.0) return u1 == 0.0 ? u2 * b : kInf;
      return u2 * b - u1 * u1 / (4.0 * u2 * a);
    }
  }
  return kInf;
}

OffsetSet curve_offsets_below(const Curve& h, const Vec2& v) {
  const double nv = v.norm();
  if (!(std::abs(v.x()) > kParallelTol * nv)) return OffsetSet::none();
  const double m = v.y() / v.x();
  // Lines (x, m x + q) with q < I (attained) or q <= I (not attained), I = inf(h - m x).
  bool ok = false, attained = true;
  double I = 0.0;
  auto horizontal = std::abs(m) <= kParallelTol;
  switch (h.kind) {
    case Curve::Kind::Constant:
      ok = horizontal;
      I = h.p0;
      break;
    case Curve::Kind::Linear:
      ok = std::abs(m - h.p0) <= kParallelTol * (1.0 + std::abs(h.p0));
      I = h.p1;
      break;
    case Curve::Kind::ExpAbs:
      ok = horizontal;
      if (h.p0 > 0.0) {
        I = h.p1;
        attained = false;
      } else {
        I = h.p1 + h.p0;
      }
      break;
    case Curve::Kind::Hyperbola:
      ok = false;
      break;
    case Curve::Kind::Parabola:
      if (h.p0 > 0.0) {
        ok = true;
        I = h.p1 - m * m / (4.0 * h.p0);
      } else if (h.p0 == 0.0) {
        ok = horizontal;
        I = h.p1;
      }
      break;
  }
  if (!ok) return OffsetSet::none();
  OffsetSet q;
  q.ranges.push_back({-kInf, I, false, !attained});
  return q.mapped(v.x(), 0.0);  // c = v1 q
}

}  // namespace

double Curve::operator()(double x) const {
  switch (kind) {
    case Kind::Constant: return p0;
    case Kind::Linear: return p0 * x + p1;
    case Kind::ExpAbs: return p0 * std::exp(-std::abs(x)) + p1;
    case Kind::Hyperbola: return p0 / x;
    case Kind::Parabola: return p0 * x * x + p1;
  }
  return 0.0;
}

Curve Curve::negated() const {
  switch (kind) {
    case Kind::Constant: return constant(-p0);
    case Kind::Hyperbola: return hyperbola(-p0);
    default: return {kind, -p0, -p1};
  }
}

std::string Curve::to_string() const {
  switch (kind) {
    case Kind::Constant: return "(const " + format_number(p0) + ")";
    case Kind::Linear: return "(linear " + format_number(p0) + " " + format_number(p1) + ")";
    case Kind::ExpAbs: return "(expabs " + format_number(p0) + " " + format_number(p1) + ")";
    case Kind::Hyperbola: return "(hyperbola " + format_number(p0) + ")";
    case Kind::Parabola: return "(parabola " + format_number(p0) + " " + format_number(p1) + ")";
  }
  return "";
}

Curve Curve::from_sexpr(const SExpr& e) {
  if (!e.is_list) parse_fail(e, "expected a curve form");
  const std::string& h = e.head();
  auto num = [&](std::size_t i) {
    const double v = to_number(e.arg(i));
    if (!std::isfinite(v)) parse_fail(e.arg(i), "curve parameters must be finite");
    return v;
  };
  if (h == "const") { expect_arity(e, 1); return constant(num(0)); }
  if (h == "linear") { expect_arity(e, 2); return linear(num(0), num(1)); }
  if (h == "expabs") { expect_arity(e, 2); return exp_abs(num(0), num(1)); }
  if (h == "hyperbola") { expect_arity(e, 1); return hyperbola(num(0)); }
  if (h == "parabola") { expect_arity(e, 2); return parabola(num(0), num(1)); }
  parse_fail(e, "unknown curve '" + h + "'");
}

bool SliceSet::contains(double s) const {
  return std::any_of(spans.begin(), spans.end(), [&](const Span& sp) { return sp.lo < s && s < sp.hi; });
}

bool SliceSet::covers(double lo, double hi) const {
  return std::any_of(spans.begin(), spans.end(), [&](const Span& sp) { return sp.lo < lo && hi < sp.hi; });
}

SliceSet SliceSet::all() { return interval(-kInf, kInf); }

SliceSet SliceSet::interval(double lo, double hi) {
  SliceSet s;
  if (lo < hi) s.spans.push_back({lo, hi});
  return s;
}

SliceSet SliceSet::united(const SliceSet& other) const {
  std::vector<Span> all = spans;
  all.insert(all.end(), other.spans.begin(), other.spans.end());
  std::sort(all.begin(), all.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
  SliceSet out;
  out.approximate = approximate || other.approximate;
  for (const auto& sp : all) {
    // Open intervals sharing only an endpoint stay separate.
    if (!out.spans.empty() && sp.lo < out.spans.back().hi) {
      out.spans.back().hi = std::max(out.spans.back().hi, sp.hi);
    } else {
      out.spans.push_back(sp);
    }
  }
  return out;
}

SliceSet SliceSet::intersected(const SliceSet& other) const {
  SliceSet out;
  out.approximate = approximate || other.approximate;
  for (const auto& a : spans) {
    for (const auto& b : other.spans) {
      const double lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
      if (lo < hi) out.spans.push_back({lo, hi});
    }
  }
  std::sort(out.spans.begin(), out.spans.end(), [](const Span& a, const Span& b) { return a.lo < b.lo; });
  return out;
}

bool OffsetSet::Range::empty() const {
  if (lo < hi) return false;
  return !(lo == hi && lo_closed && hi_closed && std::isfinite(lo));
}

double OffsetSet::Range::pick() const {
  if (lo == hi) return lo;
  if (std::isfinite(lo) && std::isfinite(hi)) return 0.5 * (lo + hi);
  if (std::isfinite(lo)) return lo + 1.0;
  if (std::isfinite(hi)) return hi - 1.0;
  return 0.0;
}

OffsetSet OffsetSet::all() {
  OffsetSet s;
  s.ranges.push_back({-kInf, kInf, false, false});
  return s;
}

bool OffsetSet::empty() const {
  return std::all_of(ranges.begin(), ranges.end(), [](const Range& r) { return r.empty(); });
}

OffsetSet OffsetSet::intersected(const OffsetSet& o) const {
  OffsetSet out;
  out.exact = exact && o.exact;
  for (const auto& a : ranges) {
    for (const auto& b : o.ranges) {
      Range r{};
      if (a.lo > b.lo) { r.lo = a.lo; r.lo_closed = a.lo_closed; }
      else if (b.lo > a.lo) { r.lo = b.lo; r.lo_closed = b.lo_closed; }
      else { r.lo = a.lo; r.lo_closed = a.lo_closed && b.lo_closed; }
      if (a.hi < b.hi) { r.hi = a.hi; r.hi_closed = a.hi_closed; }
      else if (b.hi < a.hi) { r.hi = b.hi; r.hi_closed = b.hi_closed; }
      else { r.hi = a.hi; r.hi_closed = a.hi_closed && b.hi_closed; }
      if (!r.empty()) out.ranges.push_back(r);
    }
  }
  return out;
}

OffsetSet OffsetSet::united(const OffsetSet& o) const {
  OffsetSet out;
  out.exact = false;
  for (const auto& r : ranges) if (!r.empty()) out.ranges.push_back(r);
  for (const auto& r : o.ranges) if (!r.empty()) out.ranges.push_back(r);
  return out;
}

OffsetSet OffsetSet::mapped(double k, double b) const {
  OffsetSet out;
  out.exact = exact;
  for (const auto& r : ranges) {
    Range m{k * r.lo + b, k * r.hi + b, r.lo_closed, r.hi_closed};
    if (k < 0.0) m = {k * r.hi + b, k * r.lo + b, r.hi_closed, r.lo_closed};
    // Infinite ends stay open.
    if (!std::isfinite(m.lo)) m.lo_closed = false;
    if (!std::isfinite(m.hi)) m.hi_closed = false;
    out.ranges.push_back(m);
  }
  return out;
}

struct DomainExpr::Node {
  struct HalfPlane { double a, b, c; };
  struct CurveRegion { Curve h; bool above; };
  struct Strip { double x0, x1; };
  struct Combine { bool is_union; std::vector<DomainExpr> parts; };
  struct Affine { Mat2 M; Mat2 Minv; Vec2 t; std::vector<DomainExpr> inner; };
  std::variant<HalfPlane, CurveRegion, Strip, Combine, Affine> v;
};

namespace {
using Node = DomainExpr::Node;

template <class... Fs>
struct overload : Fs... { using Fs::operator()...; };
template <class... Fs>
overload(Fs...) -> overload<Fs...>;
}  // namespace

DomainExpr DomainExpr::half_plane(double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) throw PreconditionError("half-plane coefficients must be finite");
  if (a == 0.0 && b == 0.0) throw PreconditionError("half-plane needs a nonzero normal");
  return DomainExpr(std::make_shared<const Node>(Node{Node::HalfPlane{a, b, c}}));
}

DomainExpr DomainExpr::below(const Curve& h) {
  return DomainExpr(std::make_shared<const Node>(Node{Node::CurveRegion{h, false}}));
}

DomainExpr DomainExpr::above(const Curve& h) {
  return DomainExpr(std::make_shared<const Node>(Node{Node::CurveRegion{h, true}}));
}

DomainExpr DomainExpr::vertical_strip(double x0, double x1) {
  if (!(x0 < x1)) throw PreconditionError("vertical strip needs x0 < x1");
  return DomainExpr(std::make_shared<const Node>(Node{Node::Strip{x0, x1}}));
}

DomainExpr DomainExpr::unite(std::vector<DomainExpr> parts) {
  if (parts.empty()) throw PreconditionError("union needs at least one part");
  return DomainExpr(std::make_shared<const Node>(Node{Node::Combine{true, std::move(parts)}}));
}

DomainExpr DomainExpr::intersect(std::vector<DomainExpr> parts) {
  if (parts.empty()) throw PreconditionError("intersection needs at least one part");
  return DomainExpr(std::make_shared<const Node>(Node{Node::Combine{false, std::move(parts)}}));
}

DomainExpr DomainExpr::affine_image(const Mat2& M, const Vec2& t, const DomainExpr& d) {
  if (!M.allFinite() || !t.allFinite()) throw PreconditionError("affine map must be finite");
  const double det = M.determinant();
  if (!(std::abs(det) > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff() * M.cwiseAbs().maxCoeff()))) {
    throw PreconditionError("affine map is not invertible");
  }
  return DomainExpr(std::make_shared<const Node>(Node{Node::Affine{M, M.inverse(), t, {d}}}));
}

bool DomainExpr::contains(const Point& p) const {
  if (p.size() != 2) throw DimensionError("planar domains take points of R^2");
  return contains(Vec2(p[0], p[1]));
}

bool DomainExpr::contains(const Vec2& p) const {
  return std::visit(
      overload{
          [&](const Node::HalfPlane& h) { return h.a * p.x() + h.b * p.y() + h.c > 0.0; },
          [&](const Node::CurveRegion& r) {
            if (!r.h.defined_at(p.x())) return false;
            const double y = r.h(p.x());
            return r.above ? p.y() > y : p.y() < y;
          },
          [&](const Node::Strip& s) { return s.x0 < p.x() && p.x() < s.x1; },
          [&](const Node::Combine& c) {
            if (c.is_union) return std::any_of(c.parts.begin(), c.parts.end(), [&](const DomainExpr& d) { return d.contains(p); });
            return std::all_of(c.parts.begin(), c.parts.end(), [&](const DomainExpr& d) { return d.contains(p); });
          },
          [&](const Node::Affine& a) { return a.inner[0].contains(Vec2(a.Minv * (p - a.t))); },
      },
      node_->v);
}

SliceSet DomainExpr::line_slice(const Vec2& o, const Vec2& v) const {
  if (!(v.norm() > 0.0)) throw PreconditionError("slice direction must be nonzero");
  return std::visit(
      overload{
          [&](const Node::HalfPlane& h) {
            return linear_positive(h.a * v.x() + h.b * v.y(), h.a * o.x() + h.b * o.y() + h.c);
          },
          [&](const Node::CurveRegion& r) -> SliceSet {
            // y > h(x) is the reflection of -y < -h(x).
            const Curve h = r.above ? r.h.negated() : r.h;
            const Vec2 oo = r.above ? refl(o) : o;
            const Vec2 vv = r.above ? refl(v) : v;
            const double o1 = oo.x(), o2 = oo.y(), v1 = vv.x(), v2 = vv.y();
            switch (h.kind) {
              case Curve::Kind::Constant:
                return linear_positive(-v2, h.p0 - o2);
              case Curve::Kind::Linear:
                return linear_positive(h.p0 * v1 - v2, h.p0 * o1 + h.p1 - o2);
              case Curve::Kind::Parabola:
                return quadratic_positive(h.p0 * v1 * v1, 2.0 * h.p0 * o1 * v1 - v2, h.p0 * o1 * o1 + h.p1 - o2);
              case Curve::Kind::Hyperbola:
                return quadratic_positive(-v1 * v2, -(o1 * v2 + o2 * v1), h.p0 - o1 * o2)
                    .intersected(linear_positive(v1, o1));
              case Curve::Kind::ExpAbs:
                if (v1 == 0.0) return linear_positive(-v2, h.p0 * std::exp(-std::abs(o1)) + h.p1 - o2);
                if (v2 == 0.0) return pull_back(expabs_horizontal(h.p0, h.p1, o2), o1, v1);
                return expabs_slanted(h.p0, h.p1, oo, vv);
            }
            return SliceSet::none();
          },
          [&](const Node::Strip& s) {
            return linear_positive(v.x(), o.x() - s.x0).intersected(linear_positive(-v.x(), s.x1 - o.x()));
          },
          [&](const Node::Combine& c) {
            SliceSet acc = c.parts[0].line_slice(o, v);
            for (std::size_t i = 1; i < c.parts.size(); ++i) {
              const SliceSet s = c.parts[i].line_slice(o, v);
              acc = c.is_union ? acc.united(s) : acc.intersected(s);
            }
            return acc;
          },
          [&](const Node::Affine& a) {
            return a.inner[0].line_slice(Vec2(a.Minv * (o - a.t)), Vec2(a.Minv * v));
          },
      },
      node_->v);
}

SliceSet DomainExpr::horizontal_slice(double b) const { return line_slice(Vec2(0.0, b), Vec2(1.0, 0.0)); }

SliceSet DomainExpr::vertical_slice(double x) const { return line_slice(Vec2(x, 0.0), Vec2(0.0, 1.0)); }

double DomainExpr::support(const Vec2& u) const {
  return std::visit(
      overload{
          [&](const Node::HalfPlane& h) {
            // sup <u, x> over a x + b y + c > 0 is finite only for u = -lambda (a, b).
            const Vec2 n(h.a, h.b);
            const double cross = u.x() * n.y() - u.y() * n.x();
            const double dot = u.dot(n);
            if (std::abs(cross) > kParallelTol * u.norm() * n.norm() || !(dot < 0.0)) {
              return u.norm() == 0.0 ? 0.0 : kInf;
            }
            return (-dot / n.squaredNorm()) * h.c;
          },
          [&](const Node::CurveRegion& r) {
            return r.above ? curve_sup_below(r.h.negated(), refl(u)) : curve_sup_below(r.h, u);
          },
          [&](const Node::Strip& s) {
            if (u.y() != 0.0) return kInf;
            return u.x() >= 0.0 ? u.x() * s.x1 : u.x() * s.x0;
          },
          [&](const Node::Combine& c) {
            double acc = c.is_union ? -kInf : kInf;
            for (const auto& d : c.parts) {
              const double h = d.support(u);
              acc = c.is_union ? std::max(acc, h) : std::min(acc, h);
            }
            return acc;
          },
          [&](const Node::Affine& a) {
            const double h = a.inner[0].support(Vec2(a.M.transpose() * u));
            return std::isfinite(h) ? h + u.dot(a.t) : h;
          },
      },
      node_->v);
}

std::vector<Vec2> DomainExpr::candidate_normals() const {
  std::vector<Vec2> out = std::visit(
      overload{
          [&](const Node::HalfPlane& h) { return std::vector<Vec2>{-Vec2(h.a, h.b).normalized()}; },
          [&](const Node::CurveRegion& r) {
            const Curve h = r.above ? r.h.negated() : r.h;
            std::vector<Vec2> c{Vec2(0.0, 1.0)};
            if (h.kind == Curve::Kind::Linear) c.push_back(Vec2(-h.p0, 1.0).normalized());
            if (h.kind == Curve::Kind::Hyperbola) {
              c.push_back(Vec2(-1.0, 0.0));
              c.push_back(Vec2(-1.0, 1.0).normalized());
            }
            if (r.above) for (auto& u : c) u = refl(u);
            return c;
          },
          [&](const Node::Strip&) { return std::vector<Vec2>{Vec2(1.0, 0.0), Vec2(-1.0, 0.0)}; },
          [&](const Node::Combine& c) {
            std::vector<Vec2> all;
            for (const auto& d : c.parts) {
              auto s = d.candidate_normals();
              all.insert(all.end(), s.begin(), s.end());
            }
            return all;
          },
          [&](const Node::Affine& a) {
            std::vector<Vec2> s = a.inner[0].candidate_normals();
            for (auto& u : s) u = (a.Minv.transpose() * u).normalized();
            return s;
          },
      },
      node_->v);
  return out;
}

std::vector<Line> DomainExpr::boundary_lines() const {
  return std::visit(
      overload{
          [&](const Node::HalfPlane& h) {
            const Vec2 n(h.a, h.b);
            return std::vector<Line>{{-h.c * n / n.squaredNorm(), Vec2(-h.b, h.a).normalized()}};
          },
          [&](const Node::CurveRegion& r) {
            const Curve& h = r.h;
            std::vector<Line> out;
            const Vec2 ex(1.0, 0.0), ey(0.0, 1.0);
            switch (h.kind) {
              case Curve::Kind::Constant: out.push_back({Vec2(0.0, h.p0), ex}); break;
              case Curve::Kind::Linear: out.push_back({Vec2(0.0, h.p1), Vec2(1.0, h.p0).normalized()}); break;
              case Curve::Kind::ExpAbs: out.push_back({Vec2(0.0, h.p1), ex}); break;
              case Curve::Kind::Hyperbola:
                out.push_back({Vec2::Zero(), ex});
                out.push_back({Vec2::Zero(), ey});
                break;
              case Curve::Kind::Parabola:
                out.push_back({Vec2(0.0, h.p1), ex});
                out.push_back({Vec2::Zero(), ey});
                break;
            }
            return out;
          },
          [&](const Node::Strip& s) {
            return std::vector<Line>{{Vec2(s.x0, 0.0), Vec2(0.0, 1.0)}, {Vec2(s.x1, 0.0), Vec2(0.0, 1.0)}};
          },
          [&](const Node::Combine& c) {
            std::vector<Line> all;
            for (const auto& d : c.parts) {
              auto s = d.boundary_lines();
              all.insert(all.end(), s.begin(), s.end());
            }
            return all;
          },
          [&](const Node::Affine& a) {
            std::vector<Line> s = a.inner[0].boundary_lines();
            for (auto& l : s) l = {a.M * l.origin + a.t, (a.M * l.dir).normalized()};
            return s;
          },
      },
      node_->v);
}

DirectionSet DomainExpr::line_directions() const {
  return std::visit(
      overload{
          [&](const Node::HalfPlane& h) { return DirectionSet{{Vec2(-h.b, h.a).normalized()}, false}; },
          [&](const Node::CurveRegion& r) {
            const Curve h = r.above ? r.h.negated() : r.h;
            DirectionSet d;
            switch (h.kind) {
              case Curve::Kind::Constant:
              case Curve::Kind::ExpAbs: d.dirs.push_back(Vec2(1.0, 0.0)); break;
              case Curve::Kind::Linear: d.dirs.push_back(Vec2(1.0, h.p0).normalized()); break;
              case Curve::Kind::Hyperbola: break;
              case Curve::Kind::Parabola:
                if (h.p0 >= 0.0) d.dirs.push_back(Vec2(1.0, 0.0));
                d.continuum = h.p0 > 0.0;
                break;
            }
            if (r.above) for (auto& v : d.dirs) v = refl(v);
            return d;
          },
          [&](const Node::Strip&) { return DirectionSet{{Vec2(0.0, 1.0)}, false}; },
          [&](const Node::Combine& c) {
            DirectionSet out;
            bool all_continuum = true;
            for (const auto& p : c.parts) all_continuum = all_continuum && p.line_directions().continuum;
            for (const auto& p : c.parts) {
              DirectionSet s = p.line_directions();
              // In an intersection, a factor with finitely many directions bounds the candidates.
              if (!c.is_union && !all_continuum && s.continuum) continue;
              out.dirs.insert(out.dirs.end(), s.dirs.begin(), s.dirs.end());
              out.continuum = out.continuum || s.continuum;
            }
            return out;
          },
          [&](const Node::Affine& a) {
            DirectionSet s = a.inner[0].line_directions();
            for (auto& v : s.dirs) v = (a.M * v).normalized();
            return s;
          },
      },
      node_->v);
}

OffsetSet DomainExpr::line_offsets(const Vec2& v) const {
  return std::visit(
      overload{
          [&](const Node::HalfPlane& h) {
            const Vec2 ab(h.a, h.b);
            if (std::abs(ab.dot(v)) > kParallelTol * ab.norm() * v.norm()) return OffsetSet::none();
            const Vec2 n(-v.y(), v.x());
            const double lambda = ab.dot(n) / n.squaredNorm();
            OffsetSet s;
            if (lambda > 0.0) s.ranges.push_back({-h.c / lambda, kInf, false, false});
            else s.ranges.push_back({-kInf, -h.c / lambda, false, false});
            return s;
          },
          [&](const Node::CurveRegion& r) {
            if (!r.above) return curve_offsets_below(r.h, v);
            // Reflection has determinant -1, so offsets flip sign.
            return curve_offsets_below(r.h.negated(), refl(v)).mapped(-1.0, 0.0);
          },
          [&](const Node::Strip& s) {
            if (std::abs(v.x()) > kParallelTol * v.norm()) return OffsetSet::none();
            // c = -v2 x on a vertical line
            const double a = -v.y() * s.x0, b = -v.y() * s.x1;
            OffsetSet o;
            o.ranges.push_back({std::min(a, b), std::max(a, b), false, false});
            return o;
          },
          [&](const Node::Combine& c) {
            OffsetSet acc = c.parts[0].line_offsets(v);
            for (std::size_t i = 1; i < c.parts.size(); ++i) {
              const OffsetSet s = c.parts[i].line_offsets(v);
              acc = c.is_union ? acc.united(s) : acc.intersected(s);
            }
            return acc;
          },
          [&](const Node::Affine& a) {
            const Vec2 w = a.Minv * v;
            const Vec2 n(-v.y(), v.x());
            return a.inner[0].line_offsets(w).mapped(a.M.determinant(), n.dot(a.t));
          },
      },
      node_->v);
}

bool DomainExpr::union_free() const {
  return std::visit(overload{
                        [](const Node::Combine& c) {
                          return !c.is_union && std::all_of(c.parts.begin(), c.parts.end(),
                                                            [](const DomainExpr& d) { return d.union_free(); });
                        },
                        [](const Node::Affine& a) { return a.inner[0].union_free(); },
                        [](const auto&) { return true; },
                    },
                    node_->v);
}

std::string DomainExpr::to_string() const {
  return std::visit(
      overload{
          [](const Node::HalfPlane& h) {
            return "(halfplane " + format_number(h.a) + " " + format_number(h.b) + " " + format_number(h.c) + ")";
          },
          [](const Node::CurveRegion& r) { return std::string(r.above ? "(above " : "(below ") + r.h.to_string() + ")"; },
          [](const Node::Strip& s) { return "(vstrip " + format_number(s.x0) + " " + format_number(s.x1) + ")"; },
          [](const Node::Combine& c) {
            std::string out = c.is_union ? "(union" : "(inter";
            for (const auto& d : c.parts) out += " " + d.to_string();
            return out + ")";
          },
          [](const Node::Affine& a) {
            return "(affine (" + format_number(a.M(0, 0)) + " " + format_number(a.M(0, 1)) + " " +
                   format_number(a.M(1, 0)) + " " + format_number(a.M(1, 1)) + ") (" + format_number(a.t.x()) + " " +
                   format_number(a.t.y()) + ") " + a.inner[0].to_string() + ")";
          },
      },
      node_->v);
}

DomainExpr DomainExpr::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

DomainExpr DomainExpr::from_sexpr(const SExpr& e) {
  if (e.is_atom()) {
    if (auto d = catalog_domain(e.atom)) return *d;
    parse_fail(e, "unknown domain '" + e.atom + "'");
  }
  const std::string& h = e.head();
  try {
    if (h == "halfplane") {
      expect_arity(e, 3);
      return half_plane(to_number(e.arg(0)), to_number(e.arg(1)), to_number(e.arg(2)));
    }
    if (h == "below" || h == "above") {
      expect_arity(e, 1);
      const Curve c = Curve::from_sexpr(e.arg(0));
      return h == "below" ? below(c) : above(c);
    }
    if (h == "vstrip") {
      expect_arity(e, 2);
      return vertical_strip(to_number(e.arg(0)), to_number(e.arg(1)));
    }
    if (h == "union" || h == "inter") {
      if (e.arity() == 0) parse_fail(e, "'" + h + "' needs at least one operand");
      std::vector<DomainExpr> parts;
      for (std::size_t i = 0; i < e.arity(); ++i) parts.push_back(from_sexpr(e.arg(i)));
      return h == "union" ? unite(std::move(parts)) : intersect(std::move(parts));
    }
    if (h == "affine") {
      expect_arity(e, 3);
      const auto m = to_numbers(e.arg(0));
      const auto t = to_numbers(e.arg(1));
      if (m.size() != 4) parse_fail(e.arg(0), "affine matrix needs 4 entries");
      if (t.size() != 2) parse_fail(e.arg(1), "affine translation needs 2 entries");
      Mat2 M;
      M << m[0], m[1], m[2], m[3];
      return affine_image(M, Vec2(t[0], t[1]), from_sexpr(e.arg(2)));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    parse_fail(e, err.what());
  }
  parse_fail(e, "unknown domain form '" + h + "'");
}

}  // namespace renormlab
