#include "renormlab/tube.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "renormlab/errors.hpp"
#include "renormlab/sexpr.hpp"

namespace renormlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 unit_at(double angle) { return {std::cos(angle), std::sin(angle)}; }

std::string fmt(const Vec2& v) { return "(" + format_number(v.x()) + ", " + format_number(v.y()) + ")"; }

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

std::vector<Vec2> convex_hull(std::vector<Vec2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Vec2> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    const Vec2& p = pts[i - 1];
    while (k >= t && cross(h[k - 1] - h[k - 2], p - h[k - 2]) <= 0.0) --k;
    h[k++] = p;
  }
  h.resize(k - 1);
  return h;
}

// Radius of the largest disk around the origin inside a ccw convex polygon.
double inscribed_radius_at_origin(const std::vector<Vec2>& poly) {
  if (poly.size() < 3) return 0.0;
  double r = kInf;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const Vec2 e = b - a;
    r = std::min(r, cross(e, -a) / e.norm());
  }
  return std::max(r, 0.0);
}

// Points of d found on a family of lines within the box [-R, R]^2.
std::vector<Vec2> sample_points(const DomainExpr& d, double R, int grid_directions) {
  std::vector<Vec2> dirs;
  for (int i = 0; i < grid_directions; ++i) dirs.push_back(unit_at(std::numbers::pi * i / grid_directions));
  for (const auto& l : d.boundary_lines()) dirs.push_back(l.dir.normalized());
  std::vector<double> offsets{0.0};
  for (int i = 0; i <= 40; ++i) {
    offsets.push_back(R * std::ldexp(1.0, -i));
    offsets.push_back(-R * std::ldexp(1.0, -i));
  }
  std::vector<Vec2> pts;
  for (const auto& v : dirs) {
    const Vec2 n(-v.y(), v.x());
    for (double c : offsets) {
      const Vec2 o = c * n;
      for (const auto& sp : d.line_slice(o, v).spans) {
        const double lo = std::max(sp.lo, -R), hi = std::min(sp.hi, R);
        if (!(lo < hi)) continue;
        const double eta = 1e-9 * (hi - lo);
        for (double s : {sp.lo < -R ? -R : lo + eta, sp.hi > R ? R : hi - eta}) {
          const Vec2 p = o + s * v;
          if (std::abs(p.x()) <= R && std::abs(p.y()) <= R && d.contains(p)) pts.push_back(p);
        }
      }
    }
  }
  return pts;
}

// Distance from p to d measured along the normal n (an upper bound on dist(p, d)).
double normal_gap(const DomainExpr& d, const Vec2& p, const Vec2& n) {
  if (d.contains(p)) return 0.0;
  double best = kInf;
  for (const auto& sp : d.line_slice(p, n).spans) {
    if (sp.lo >= 0.0) best = std::min(best, sp.lo);
    else if (sp.hi <= 0.0) best = std::min(best, -sp.hi);
    else best = 0.0;
  }
  return best;
}

}  // namespace

std::string to_string(PointStatus s) {
  switch (s) {
    case PointStatus::Bounded: return "Bounded";
    case PointStatus::Unbounded: return "Unbounded";
    default: return "Undecided";
  }
}

std::string to_string(Ternary t) {
  switch (t) {
    case Ternary::Yes: return "Yes";
    case Ternary::No: return "No";
    default: return "Undecided";
  }
}

std::string to_string(HullClass c) {
  switch (c) {
    case HullClass::InHalfPlane: return "InHalfPlane";
    case HullClass::FullPlane: return "FullPlane";
    default: return "Undecided";
  }
}

std::string to_string(EscapeClass c) {
  switch (c) {
    case EscapeClass::Property1: return "Property1";
    case EscapeClass::Property2: return "Property2";
    case EscapeClass::Neither: return "Neither";
    default: return "NotApplicable";
  }
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Hyperbolic: return "Hyperbolic";
    case Verdict::NotHyperbolic: return "NotHyperbolic";
    case Verdict::CertifiedByCorollary: return "CertifiedByCorollary";
    default: return "Undecided";
  }
}

bool seg_fits(const DomainExpr& d, double k, double b) {
  if (!(k > 0.0)) throw PreconditionError("segment half-length must be positive");
  return d.horizontal_slice(b).covers(-k, k);
}

BoundedPointResult bounded_point(const DomainExpr& d, const Vec2& a, const BoundedSchedule& schedule) {
  if (d.support(Vec2(0.0, -1.0)) > 1e-12) throw PreconditionError("domain is not normalized into the upper half-plane");
  if (!d.contains(a)) throw PreconditionError("point is not in the domain");
  if (schedule.samples_per_window < 1 || schedule.vertical_probes < 2) throw PreconditionError("schedule too small");

  BoundedPointResult res;
  bool every_level = true;
  for (int j = 0; j <= schedule.max_level; ++j) {
    const double k = std::ldexp(1.0, j);
    const double delta = std::ldexp(1.0, -j);
    const double lo = a.y() - delta, hi = a.y() + delta;

    std::optional<double> found;
    std::vector<double> heights{a.y()};
    const int S = schedule.samples_per_window;
    for (int i = 0; i < S; ++i) heights.push_back(S == 1 ? a.y() : lo + (hi - lo) * i / (S - 1));
    for (double b : heights) {
      const SliceSet s = d.horizontal_slice(b);
      res.approximate = res.approximate || s.approximate;
      if (s.covers(-k, k)) {
        found = b;
        break;
      }
    }
    if (found) {
      res.ks.push_back(k);
      res.heights.push_back(*found);
      continue;
    }
    every_level = false;
    const int P = schedule.vertical_probes;
    for (int i = 0; i < P; ++i) {
      const double x = -k + 2.0 * k * i / (P - 1);
      const SliceSet v = d.vertical_slice(x);
      res.approximate = res.approximate || v.approximate;
      const bool meets = std::any_of(v.spans.begin(), v.spans.end(),
                                     [&](const SliceSet::Span& sp) { return sp.lo < hi && sp.hi > lo; });
      if (!meets) {
        res.status = PointStatus::Bounded;
        res.blocking_k = k;
        res.blocking_x = x;
        return res;
      }
    }
  }
  res.status = every_level ? PointStatus::Unbounded : PointStatus::Undecided;
  return res;
}

LineResult contains_affine_line(const DomainExpr& d) {
  DirectionSet ds = d.line_directions();
  std::vector<Vec2> dirs = ds.dirs;
  if (ds.continuum) {
    for (int i = 0; i < 36; ++i) dirs.push_back(unit_at(std::numbers::pi * i / 36));
  }
  bool exact = d.union_free() && !ds.continuum;
  for (const auto& v0 : dirs) {
    const Vec2 v = v0.normalized();
    const OffsetSet off = d.line_offsets(v);
    exact = exact && off.exact;
    for (const auto& r : off.ranges) {
      if (r.empty()) continue;
      const double c = r.pick();
      const Vec2 n(-v.y(), v.x());
      return {Ternary::Yes, Line{c * n, v}};
    }
  }
  return {exact ? Ternary::No : Ternary::Undecided, std::nullopt};
}

HullResult hull_classify(const DomainExpr& d, const HullOptions& opts) {
  HullResult res;
  std::vector<Vec2> dirs = d.candidate_normals();
  for (int i = 0; i < opts.grid_directions; ++i) {
    dirs.push_back(unit_at(-std::numbers::pi / 2 + 2.0 * std::numbers::pi * i / opts.grid_directions));
  }
  auto angle_from_down = [](const Vec2& u) {
    double a = std::atan2(u.y(), u.x()) + std::numbers::pi / 2;
    if (a < 0.0) a += 2.0 * std::numbers::pi;
    if (a > 2.0 * std::numbers::pi - 1e-12) a = 0.0;
    return a;
  };
  std::optional<std::pair<double, Vec2>> pick;
  for (const auto& u : dirs) {
    const double h = d.support(u);
    if (!std::isfinite(h)) continue;
    res.bounded_normals.push_back(u);
    const double ang = angle_from_down(u);
    if (!pick || ang < pick->first) pick = {ang, u};
  }
  if (pick) {
    res.cls = HullClass::InHalfPlane;
    res.normal = pick->second;
    res.offset = d.support(pick->second);
    return res;
  }
  // A disk growing linearly with the scale; the constant only has to be scale-free.
  constexpr double kMinRadiusFraction = 0.02;
  bool all = !opts.scales.empty();
  for (double R : opts.scales) {
    const auto hull = convex_hull(sample_points(d, R, 24));
    const double r = inscribed_radius_at_origin(hull);
    if (r < kMinRadiusFraction * R) {
      all = false;
      break;
    }
    res.hull_vertices = hull;
    res.disk_radius = r;
  }
  if (all) res.cls = HullClass::FullPlane;
  else res.hull_vertices.clear();
  return res;
}

DomainExpr normalize_halfplane(const DomainExpr& d, const Vec2& normal, double offset) {
  const Vec2 u = normal.normalized();
  // Rows: the rotation sends u to (0, -1).
  Mat2 R;
  R << -u.y(), u.x(), -u.x(), -u.y();
  return DomainExpr::affine_image(R, Vec2(0.0, offset / normal.norm()), d);
}

EscapeResult corollary_escape_check(const DomainExpr& d, const EscapeOptions& opts, const HullOptions& hull_opts) {
  EscapeResult res;
  if (hull_classify(d, hull_opts).cls != HullClass::FullPlane) return res;

  std::vector<Line> lines = d.boundary_lines();
  for (int i = 0; i < opts.grid_directions; ++i) lines.push_back({Vec2::Zero(), unit_at(std::numbers::pi * i / opts.grid_directions)});
  for (const auto& l : d.boundary_lines()) lines.push_back({Vec2::Zero(), l.dir});

  res.best_line_gap = kInf;
  for (const auto& l0 : lines) {
    const Vec2 v = l0.dir.normalized();
    const Vec2 n(-v.y(), v.x());
    const Vec2 foot = l0.origin - l0.origin.dot(v) * v;  // closest point to 0
    bool adherent = true;
    double gap_at_largest = 0.0;
    for (double R : opts.scales) {
      const double h2 = R * R - foot.squaredNorm();
      if (h2 <= 0.0) {
        adherent = false;
        break;
      }
      const double half = std::sqrt(h2);
      double worst = 0.0;
      for (int i = 0; i < opts.line_samples; ++i) {
        const double s = -half + 2.0 * half * i / (opts.line_samples - 1);
        worst = std::max(worst, normal_gap(d, foot + s * v, n));
        if (worst > opts.line_tol && R != opts.scales.back()) break;
      }
      gap_at_largest = worst;
      if (worst > opts.line_tol) adherent = false;
    }
    res.best_line_gap = std::min(res.best_line_gap, gap_at_largest);
    if (adherent) res.adherent_lines.push_back({foot, v});
  }
  if (!res.adherent_lines.empty()) res.adherent_line = res.adherent_lines.front();

  bool literal_holds = false;
  for (int axis = 0; axis < 2; ++axis) {
    for (int sign : {1, -1}) {
      for (bool literal : {true, false}) {
        EscapeVariant var;
        var.literal = literal;
        var.name = std::string(axis == 0 ? "x" : "y") + (sign > 0 ? ":+inf:" : ":-inf:") +
                   (literal ? "literal" : "neighbourhood");
        std::size_t covered = 0;
        for (double t : opts.t_grid) {
          bool ok = true;
          for (std::size_t k = 0; k < opts.scales.size() && ok; ++k) {
            const double R = opts.scales[k];
            const double delta = literal ? opts.neighbourhood * std::pow(0.1, static_cast<double>(k)) : opts.neighbourhood;
            bool hit = false;
            for (int i = 0; i < 9 * 4 && !hit; ++i) {
              // Heights across the window, zooming towards t.
              const double zoom = std::pow(0.1, static_cast<double>(i / 9));
              const double c = t + delta * zoom * 0.999 * ((i % 9) / 4.0 - 1.0);
              const SliceSet s = axis == 0 ? d.horizontal_slice(c) : d.vertical_slice(c);
              for (const auto& sp : s.spans) {
                if ((sign > 0 && sp.hi > R) || (sign < 0 && sp.lo < -R)) hit = true;
              }
            }
            ok = hit;
          }
          if (ok) ++covered;
        }
        var.coverage = opts.t_grid.empty() ? 0.0 : static_cast<double>(covered) / opts.t_grid.size();
        var.holds = !opts.t_grid.empty() && covered == opts.t_grid.size();
        literal_holds = literal_holds || (literal && var.holds);
        res.variants.push_back(var);
      }
    }
  }

  if (res.adherent_line) res.cls = EscapeClass::Property1;
  else if (literal_holds) res.cls = EscapeClass::Property2;
  else res.cls = EscapeClass::Neither;
  return res;
}

namespace {

// A point of the slice set, preferring bounded spans.
std::optional<double> slice_point(const SliceSet& s) {
  for (const auto& sp : s.spans) {
    if (std::isfinite(sp.lo) && std::isfinite(sp.hi)) return 0.5 * (sp.lo + sp.hi);
  }
  for (const auto& sp : s.spans) {
    if (std::isfinite(sp.lo)) return sp.lo + 1.0;
    if (std::isfinite(sp.hi)) return sp.hi - 1.0;
    return 0.0;
  }
  return std::nullopt;
}

}  // namespace

TubeReport classify_tube(const DomainExpr& d, const TubeConfig& cfg) {
  TubeReport rep;
  rep.hull = hull_classify(d, cfg.hull);
  rep.line = contains_affine_line(d);

  if (rep.line->answer == Ternary::Yes) {
    rep.brody = Verdict::NotHyperbolic;
    rep.evidence.push_back({"affine_line", "the base contains the line through " + fmt(rep.line->witness->origin) +
                                               " with direction " + fmt(rep.line->witness->dir),
                            {rep.line->witness->origin, rep.line->witness->origin + rep.line->witness->dir}});
  }

  if (rep.hull.cls == HullClass::InHalfPlane) {
    rep.evidence.push_back({"hull_normal", "the base lies in {<u, x> < " + format_number(rep.hull.offset) + "} for u = " +
                                               fmt(rep.hull.normal),
                            {rep.hull.normal}});
    const DomainExpr nd = normalize_halfplane(d, rep.hull.normal, rep.hull.offset);
    rep.normalized = nd.to_string();
    if (rep.line->answer == Ternary::No) {
      rep.brody = Verdict::Hyperbolic;
      rep.evidence.push_back({"no_affine_line", "no direction admits a line inside the base", {}});
    }

    std::vector<Vec2> witnesses;
    for (double h : cfg.witness_heights) {
      if (auto x = slice_point(nd.horizontal_slice(h)); x && nd.contains(Vec2(*x, h))) witnesses.emplace_back(*x, h);
    }
    std::vector<Vec2> probes;
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> height(0.0, cfg.probe_max_height);
    for (int attempt = 0; attempt < 8 * cfg.random_probes && static_cast<int>(probes.size()) < cfg.random_probes; ++attempt) {
      const double h = height(rng);
      if (!(h > 0.0)) continue;
      const SliceSet s = nd.horizontal_slice(h);
      if (s.empty()) continue;
      std::uniform_int_distribution<std::size_t> which(0, s.spans.size() - 1);
      const auto sp = s.spans[which(rng)];
      const double lo = std::max(sp.lo, -100.0), hi = std::min(sp.hi, 100.0);
      if (!(lo < hi)) continue;
      std::uniform_real_distribution<double> xs(lo, hi);
      const Vec2 p(xs(rng), h);
      if (nd.contains(p)) probes.push_back(p);
    }

    bool all_bounded = !witnesses.empty();
    std::optional<Evidence> unbounded;
    std::size_t bounded_count = 0;
    auto examine = [&](const Vec2& a, bool witness) {
      const BoundedPointResult r = bounded_point(nd, a, cfg.schedule);
      if (r.status == PointStatus::Bounded) {
        ++bounded_count;
      } else if (witness) {
        all_bounded = false;
      }
      if (r.status == PointStatus::Unbounded && !unbounded) {
        std::vector<Vec2> pts{a};
        for (std::size_t i = 0; i < r.ks.size(); ++i) pts.emplace_back(r.ks[i], r.heights[i]);
        unbounded = Evidence{"unbounded_point",
                             "segments [-k, k] x {b_k} fit for every scheduled k near the normalized point " + fmt(a) +
                                 " (points list (k, b_k))",
                             pts};
      }
    };
    for (const auto& a : witnesses) examine(a, true);
    for (const auto& a : probes) examine(a, false);

    if (unbounded) {
      rep.kobayashi = Verdict::NotHyperbolic;
      rep.evidence.push_back(*unbounded);
    } else if (all_bounded) {
      rep.kobayashi = Verdict::Hyperbolic;
      std::vector<Vec2> pts = witnesses;
      rep.evidence.push_back({"bounded_points",
                              std::to_string(bounded_count) + " of " + std::to_string(witnesses.size() + probes.size()) +
                                  " normalized points certified bounded, including every witness point",
                              pts});
    }
  } else if (rep.hull.cls == HullClass::FullPlane) {
    rep.evidence.push_back({"hull_points", "sampled points whose convex hull contains the disk of radius " +
                                               format_number(rep.hull.disk_radius) + " around the origin",
                            rep.hull.hull_vertices});
    rep.escape = corollary_escape_check(d, cfg.escape, cfg.hull);
    switch (rep.escape->cls) {
      case EscapeClass::Neither: {
        rep.kobayashi = Verdict::CertifiedByCorollary;
        std::ostringstream os;
        os << "no adherent line (smallest sampled gap " << format_number(rep.escape->best_line_gap)
           << ") and no escape variant covers every t";
        rep.evidence.push_back({"escape_neither", os.str(), {}});
        break;
      }
      case EscapeClass::Property1:
        rep.evidence.push_back({"property1", "adherent line through " + fmt(rep.escape->adherent_line->origin) +
                                                 " with direction " + fmt(rep.escape->adherent_line->dir),
                                {rep.escape->adherent_line->origin}});
        break;
      case EscapeClass::Property2: {
        std::string names;
        for (const auto& v : rep.escape->variants) {
          if (v.holds && v.literal) names += (names.empty() ? "" : ", ") + v.name;
        }
        rep.evidence.push_back({"property2", "escape variants holding for every t: " + names, {}});
        break;
      }
      case EscapeClass::NotApplicable: break;
    }
  }

  // Kobayashi hyperbolicity forces Brody hyperbolicity.
  if (rep.brody == Verdict::Undecided &&
      (rep.kobayashi == Verdict::Hyperbolic || rep.kobayashi == Verdict::CertifiedByCorollary)) {
    rep.brody = Verdict::Hyperbolic;
    rep.evidence.push_back({"implied", "Brody hyperbolicity follows from the Kobayashi verdict", {}});
  }
  return rep;
}

}  // namespace renormlab
