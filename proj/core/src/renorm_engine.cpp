#include "renormlab/renorm_engine.hpp"

#include <algorithm>
#include <cmath>

#include "renormlab/errors.hpp"
#include "renormlab/parallel.hpp"

namespace renormlab {

namespace {

double checked_phi(const ScalarField& phi, const Point& x) {
  const double v = phi(x);
  if (!std::isfinite(v) || v < 0.0) throw NumericError("selection weight is not a finite nonnegative number");
  return v;
}

struct Candidate {
  Point x;
  double phi = 0.0;
  double dist_to_origin = 0.0;
};

// Larger phi first, then nearer to the starting point, then lexicographic.
bool better(const Candidate& a, const Candidate& b) {
  if (a.phi != b.phi) return a.phi > b.phi;
  if (a.dist_to_origin != b.dist_to_origin) return a.dist_to_origin < b.dist_to_origin;
  return lex_less(a.x, b.x);
}

// Integer offsets k in [-J, J]^m with |k| <= J.
std::vector<Eigen::VectorXi> lattice_ball(Eigen::Index m, int J) {
  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi k = Eigen::VectorXi::Constant(m, -J);
  const long J2 = static_cast<long>(J) * J;
  while (true) {
    long s = 0;
    for (Eigen::Index i = 0; i < m; ++i) s += static_cast<long>(k[i]) * k[i];
    if (s <= J2) out.push_back(k);
    Eigen::Index i = m - 1;
    while (i >= 0 && k[i] == J) {
      k[i] = -J;
      --i;
    }
    if (i < 0) break;
    ++k[i];
  }
  return out;
}

int capped_points(Eigen::Index m, int J, std::size_t cap) {
  while (J > 1 && std::pow(2.0 * J + 1.0, static_cast<double>(m)) > static_cast<double>(cap)) J /= 2;
  return std::max(J, 1);
}

}  // namespace

bool MetricSpaceView::contains(const Point& x) const {
  if (is_finite()) {
    return std::any_of(points.begin(), points.end(), [&](const Point& y) { return y.size() == x.size() && y == x; });
  }
  return x.size() == ball_center.size() && distance(x, ball_center) <= ball_radius;
}

MetricSpaceView MetricSpaceView::finite(std::vector<Point> pts, ScalarField phi, Distance dist) {
  if (pts.empty()) throw PreconditionError("finite metric space needs at least one point");
  MetricSpaceView v;
  v.points = std::move(pts);
  v.phi = std::move(phi);
  v.dist = dist ? std::move(dist) : Distance([](const Point& a, const Point& b) { return distance(a, b); });
  return v;
}

MetricSpaceView MetricSpaceView::ball(Point center, double radius, ScalarField phi) {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw PreconditionError("ball radius must be positive and finite");
  MetricSpaceView v;
  v.ball_center = std::move(center);
  v.ball_radius = radius;
  v.phi = std::move(phi);
  v.dist = [](const Point& a, const Point& b) { return distance(a, b); };
  return v;
}

Selection zalcman_select(const MetricSpaceView& V, const Point& p, double tau, double eps,
                         const SelectionBudget& budget) {
  if (!(tau > 1.0)) throw PreconditionError("tau must exceed 1");
  if (!(eps > 0.0)) throw PreconditionError("eps must be positive");
  if (!V.contains(p)) throw PreconditionError("start point is not in the space");

  Selection sel;
  sel.phi_p = checked_phi(V.phi, p);
  if (!(sel.phi_p > 0.0)) throw PreconditionError("weight must be positive at the start point");

  std::vector<double> finite_phi;
  if (V.is_finite()) {
    finite_phi.resize(V.points.size());
    parallel_for(V.points.size(), [&](std::size_t i) { finite_phi[i] = checked_phi(V.phi, V.points[i]); });
  }

  Point current = p;
  double phi_cur = sel.phi_p;
  const Eigen::Index m = p.size();

  for (int it = 0;; ++it) {
    const double radius = 1.0 / (eps * phi_cur);
    const double limit = tau * phi_cur;
    std::optional<Candidate> best;
    std::size_t checked = 0;
    int used_J = 0;

    if (V.is_finite()) {
      for (std::size_t i = 0; i < V.points.size(); ++i) {
        const Point& x = V.points[i];
        if (V.dist(x, current) > radius) continue;
        ++checked;
        if (finite_phi[i] > limit) {
          Candidate c{x, finite_phi[i], V.dist(p, x)};
          if (!best || better(c, *best)) best = c;
        }
      }
    } else {
      // Density scales with 1/eps so the spacing stays fixed in rescaled units.
      int J = static_cast<int>(std::ceil(budget.base_points_per_radius * std::max(1.0, 1.0 / eps) / 2.0));
      for (int level = 0; level < std::max(budget.refinement_levels, 1); ++level, J *= 2) {
        const int Jc = capped_points(m, J, budget.max_samples_per_level);
        used_J = Jc;
        const auto offsets = lattice_ball(m, Jc);
        std::vector<Point> xs(offsets.size());
        std::vector<char> inside(offsets.size(), 0);
        std::vector<double> vals(offsets.size(), 0.0);
        parallel_for(offsets.size(), [&](std::size_t i) {
          xs[i] = current + (radius / Jc) * offsets[i].cast<double>();
          if (!V.contains(xs[i])) return;
          inside[i] = 1;
          vals[i] = checked_phi(V.phi, xs[i]);
        });
        for (std::size_t i = 0; i < xs.size(); ++i) {
          if (!inside[i]) continue;
          ++checked;
          if (vals[i] > limit) {
            Candidate c{xs[i], vals[i], distance(p, xs[i])};
            if (!best || better(c, *best)) best = c;
          }
        }
        if (best || Jc < J) break;
      }
    }

    sel.samples_checked += checked;
    if (!best) {
      sel.q = current;
      sel.phi_q = phi_cur;
      sel.iterations = it;
      sel.exhaustive = V.is_finite();
      sel.points_per_radius = used_J;
      sel.sample_spacing = V.is_finite() ? 0.0 : radius / used_J;
      sel.certified_radius = radius;
      return sel;
    }
    if (it + 1 >= budget.max_iterations) {
      throw SelectionIncomplete("selection budget exhausted after " + std::to_string(it + 1) + " moves", best->x);
    }
    current = best->x;
    phi_cur = best->phi;
  }
}

GridSpec default_probe(Eigen::Index dim) {
  return GridSpec(Box::cube(dim, -1.0, 1.0), dim <= 2 ? 21 : 11);
}

RenormStep rescale_step(int n, const ScalarField& phi, const Point& r, const Point& r_n, const RescalingOptions& opts,
                        const std::function<double(const AffineChart&)>& gtilde0_route) {
  const Eigen::Index m = r.size();
  if (r_n.size() != m) throw DimensionError("drifting point has the wrong dimension");
  const double start = checked_phi(phi, r_n);
  if (!(start > 0.0)) throw PreconditionError("weight vanishes at the drifting point");

  RenormStep step;
  step.n = n;
  step.phi_start = start;
  step.eps = std::pow(start, -1.0 / 3.0);
  step.tau = 1.0 + step.eps;

  const MetricSpaceView V = MetricSpaceView::ball(r, opts.ball_radius, phi);
  if (!V.contains(r_n)) throw PreconditionError("drifting point lies outside the selection ball");
  const Selection sel = zalcman_select(V, r_n, step.tau, step.eps, opts.budget);

  const double a = 1.0 / sel.phi_q;
  step.chart = AffineChart(a, sel.q);
  step.phi_selected = sel.phi_q;
  step.iterations = sel.iterations;
  step.points_per_radius = sel.points_per_radius;
  step.exhaustive = sel.exhaustive;
  step.gtilde0 = gtilde0_route ? gtilde0_route(step.chart) : a * sel.phi_q;

  const GridSpec probe = opts.probe ? *opts.probe : default_probe(m);
  if (probe.dim() != m) throw DimensionError("probe grid has the wrong dimension");
  const auto nodes = probe.nodes();
  std::vector<double> g(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) { g[i] = a * checked_phi(phi, step.chart.apply(nodes[i])); });
  step.sup_bound = *std::max_element(g.begin(), g.end());

  // Lipschitz estimate of the rescaled weight from neighbouring probe nodes.
  double lip = 0.0;
  const std::size_t n_axis = static_cast<std::size_t>(probe.points_per_axis());
  std::size_t stride = 1;
  for (Eigen::Index ax = m - 1; ax >= 0; --ax) {
    const double h = probe.spacing(ax);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if ((i / stride) % n_axis == n_axis - 1) continue;
      lip = std::max(lip, std::abs(g[i + stride] - g[i]) / h);
    }
    stride *= n_axis;
  }
  if (!sel.exhaustive && sel.points_per_radius > 0) {
    const double spacing_g = 1.0 / (step.eps * sel.points_per_radius);
    step.delta_grid = lip * spacing_g * std::sqrt(static_cast<double>(m)) / 2.0;
  }

  bool certified = true;
  for (const auto& x : nodes) {
    if (x.norm() > 1.0 / step.eps || !V.contains(step.chart.apply(x))) {
      certified = false;
      break;
    }
  }
  step.probe_certified = certified;
  return step;
}

RenormTrace make_rescaling(const WeightSequence& phiseq, const Point& r, const PointSequence& rseq,
                           const std::vector<int>& indices, const RescalingOptions& opts,
                           const std::function<double(int, const AffineChart&)>& gtilde0_route) {
  if (indices.empty()) throw PreconditionError("rescaling needs at least one index");
  std::vector<ScalarField> phis;
  std::vector<Point> rs;
  std::vector<double> start;
  for (int n : indices) {
    phis.push_back(phiseq(n));
    rs.push_back(rseq(n));
    start.push_back(checked_phi(phis.back(), rs.back()));
  }
  for (std::size_t i = 0; i < start.size(); ++i) {
    if (!(start[i] > 0.0)) throw PreconditionError("weight vanishes at r_n for n = " + std::to_string(indices[i]));
    if (i > 0 && start[i - 1] > opts.growth_threshold && !(start[i] > start[i - 1])) {
      throw PreconditionError("weight at r_n is not increasing at n = " + std::to_string(indices[i]));
    }
  }
  if (!(start.back() > opts.growth_threshold)) {
    throw PreconditionError("weight at r_n never exceeds the growth threshold");
  }

  RenormTrace trace;
  trace.base = r;
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const int n = indices[i];
    std::function<double(const AffineChart&)> route;
    if (gtilde0_route) route = [&, n](const AffineChart& c) { return gtilde0_route(n, c); };
    try {
      trace.steps.push_back(rescale_step(n, phis[i], r, rs[i], opts, route));
    } catch (const SelectionIncomplete& e) {
      throw SelectionIncomplete(e.what(), e.best_candidate(), n);
    }
  }
  return trace;
}

RenormTrace make_rescaling(const HarmonicSequence& fseq, const Point& r, const PointSequence& rseq,
                           const std::vector<int>& indices, const RescalingOptions& opts) {
  WeightSequence phis = [&](int n) -> ScalarField {
    HarmonicExpr f = fseq(n);
    return [f](const Point& x) { return tilde_derivative(f, x); };
  };
  auto route = [&](int n, const AffineChart& c) {
    return tilde_derivative(fseq(n).precompose(c), Point::Zero(c.dim()));
  };
  return make_rescaling(phis, r, rseq, indices, opts, route);
}

std::string to_string(LimitClass c) {
  switch (c) {
    case LimitClass::AffineNonconstant: return "AffineNonconstant";
    case LimitClass::ConstantFinite: return "ConstantFinite";
    case LimitClass::PlusInfinity: return "PlusInfinity";
    case LimitClass::MinusInfinity: return "MinusInfinity";
    case LimitClass::Undecided: return "Undecided";
  }
  return "Undecided";
}

ConvergenceReport classify_sequence(const std::vector<Point>& nodes, const std::vector<std::vector<double>>& values,
                                    const std::vector<int>& indices, const LimitOptions& opts) {
  if (values.empty() || values.size() != indices.size()) throw PreconditionError("window values do not match indices");
  ConvergenceReport rep;
  rep.window = indices;
  for (std::size_t k = 0; k + 1 < values.size(); ++k) {
    double gap = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i) gap = std::max(gap, std::abs(values[k][i] - values[k + 1][i]));
    rep.gaps.push_back(gap);
  }

  std::vector<double> mins, maxs;
  for (const auto& v : values) {
    mins.push_back(*std::min_element(v.begin(), v.end()));
    maxs.push_back(*std::max_element(v.begin(), v.end()));
  }
  bool plus = true, minus = true;
  for (std::size_t k = 0; k < values.size(); ++k) {
    plus = plus && mins[k] > opts.divergence_threshold && (k == 0 || mins[k] > mins[k - 1]);
    minus = minus && maxs[k] < -opts.divergence_threshold && (k == 0 || maxs[k] < maxs[k - 1]);
  }
  if (plus) {
    rep.cls = LimitClass::PlusInfinity;
    return rep;
  }
  if (minus) {
    rep.cls = LimitClass::MinusInfinity;
    return rep;
  }

  for (const auto& v : values) rep.residuals.push_back(affine_fit(nodes, v).residual);
  const auto& last = values.back();
  const bool huge = std::any_of(last.begin(), last.end(), [&](double v) { return std::abs(v) > opts.finite_cap; });
  if (huge) return rep;

  const AffineFit fit = affine_fit(nodes, last);
  rep.affine = fit.fit;
  if (fit.residual <= opts.res_max) {
    rep.cls = fit.fit.gradient.norm() >= opts.grad_min ? LimitClass::AffineNonconstant : LimitClass::ConstantFinite;
  }
  return rep;
}

ConvergenceReport limit_probe(const RenormTrace& trace, const HarmonicSequence& fseq, const GridSpec& probe,
                              std::size_t window, const LimitOptions& opts) {
  if (trace.steps.empty()) throw PreconditionError("empty trace");
  if (!probe.box().contains(Point::Zero(probe.dim()))) throw PreconditionError("probe box must contain the origin");
  const std::size_t w = std::clamp<std::size_t>(window, 1, trace.steps.size());
  const auto nodes = probe.nodes();
  std::vector<std::vector<double>> values;
  std::vector<int> idx;
  for (std::size_t s = trace.steps.size() - w; s < trace.steps.size(); ++s) {
    const RenormStep& st = trace.steps[s];
    const HarmonicExpr g = fseq(st.n).precompose(st.chart);
    std::vector<double> v(nodes.size());
    parallel_for(nodes.size(), [&](std::size_t i) { v[i] = g.eval(nodes[i]); });
    values.push_back(std::move(v));
    idx.push_back(st.n);
  }
  return classify_sequence(nodes, values, idx, opts);
}

EntireResult renormalize_entire(const HarmonicExpr& f, const Point& p, const EntireOptions& opts) {
  if (p.size() != f.dim()) throw DimensionError("seed point dimension differs from the function");
  if (opts.steps < 1) throw PreconditionError("at least one step is required");
  if (!(opts.growth > 1.0)) throw PreconditionError("scale growth must exceed 1");
  const ValueGradient vg = f.eval_with_gradient(p);
  if (!(vg.gradient.norm() > 0.0)) throw PreconditionError("gradient vanishes at the seed point");
  const double t0 = tilde_from(vg.value, vg.gradient.norm());
  if (!(t0 > 0.0)) throw PreconditionError("tilde derivative underflows at the seed point");

  const double s0 = 1.01 * opts.rescaling.growth_threshold / t0;
  EntireResult res;
  std::vector<int> indices;
  for (int j = 0; j < opts.steps; ++j) {
    indices.push_back(j);
    res.parameters.push_back(s0 * std::pow(opts.growth, j));
  }
  const auto params = res.parameters;
  HarmonicSequence fseq = [f, p, params](int j) {
    return f.precompose(AffineChart(params[static_cast<std::size_t>(j)], p));
  };
  const Point origin = Point::Zero(p.size());
  res.trace = make_rescaling(fseq, origin, [origin](int) { return origin; }, indices, opts.rescaling);
  const GridSpec probe = opts.rescaling.probe ? *opts.rescaling.probe : default_probe(p.size());
  res.report = limit_probe(res.trace, fseq, probe, opts.window, opts.limit);
  for (const auto& st : res.trace.steps) {
    const double s = params[static_cast<std::size_t>(st.n)];
    res.original_charts.emplace_back(s * st.chart.scale, p + s * st.chart.center);
  }
  return res;
}

}  // namespace renormlab
