#include "scenarios.hpp"

#include <cmath>
#include <iostream>
#include <optional>
#include <random>
#include <tuple>

#include <renormlab/errors.hpp>
#include <renormlab/field_ops.hpp>
#include <renormlab/group_targets.hpp>
#include <renormlab/harmonic_maps.hpp>
#include <renormlab/normality.hpp>
#include <renormlab/renorm_engine.hpp>
#include <renormlab/sexpr.hpp>
#include <renormlab/tube.hpp>

namespace rltool {

using namespace renormlab;

namespace {

std::string fmt(double v) { return format_number(v); }

Point point_from(Section& s, const std::string& key, Eigen::Index dim) {
  const auto v = s.numbers(key);
  if (static_cast<Eigen::Index>(v.size()) != dim)
    s.fail(key, "'" + key + "' must have " + std::to_string(dim) + " coordinates");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), dim);
}

Box box_from(Section& s, Eigen::Index dim) {
  const Point lo = point_from(s, "lo", dim);
  const Point hi = point_from(s, "hi", dim);
  std::vector<Interval> axes;
  for (Eigen::Index i = 0; i < dim; ++i) {
    if (!(lo[i] < hi[i])) s.fail("hi", "box needs lo < hi on every axis");
    axes.push_back({lo[i], hi[i]});
  }
  s.finish();
  return Box(std::move(axes));
}

int positive_int(Section& s, const std::string& key, long fallback, long lo = 1) {
  const long v = s.integer_or(key, fallback);
  if (v < lo) s.fail(key, "'" + key + "' must be at least " + std::to_string(lo));
  return static_cast<int>(v);
}

void read_budget(Section& parent, SelectionBudget& b) {
  auto s = parent.optional_section("budget");
  if (!s) return;
  b.max_iterations = positive_int(*s, "max_iterations", b.max_iterations);
  b.base_points_per_radius = positive_int(*s, "base_points_per_radius", b.base_points_per_radius);
  b.refinement_levels = positive_int(*s, "refinement_levels", b.refinement_levels);
  b.max_samples_per_level =
      static_cast<std::size_t>(positive_int(*s, "max_samples_per_level", static_cast<long>(b.max_samples_per_level)));
  s->finish();
}

void read_limit(Section& parent, LimitOptions& l) {
  auto s = parent.optional_section("limit");
  if (!s) return;
  l.res_max = s->number_or("res_max", l.res_max);
  l.grad_min = s->number_or("grad_min", l.grad_min);
  l.divergence_threshold = s->number_or("divergence_threshold", l.divergence_threshold);
  l.finite_cap = s->number_or("finite_cap", l.finite_cap);
  s->finish();
}

void read_probe(Section& parent, RescalingOptions& r, Eigen::Index dim) {
  auto s = parent.optional_section("probe");
  if (!s) return;
  const double h = s->number_or("half_width", 1.0);
  if (!(h > 0)) s->fail("half_width", "probe half_width must be positive");
  const int n = positive_int(*s, "points", dim <= 2 ? 21 : 11, 2);
  s->finish();
  r.probe = GridSpec(Box::cube(dim, -h, h), n);
}

void read_rescaling(Section& s, RescalingOptions& r, Eigen::Index dim) {
  r.ball_radius = s.number_or("ball_radius", r.ball_radius);
  r.growth_threshold = s.number_or("growth_threshold", r.growth_threshold);
  read_budget(s, r.budget);
  read_probe(s, r, dim);
}

/// Integer indices round(start * growth^j), forced strictly increasing.
std::vector<int> read_schedule(Section& parent) {
  auto s = parent.section("schedule");
  const double start = s.number("start");
  const double growth = s.number_or("growth", 1.5);
  const int steps = positive_int(s, "steps", 12);
  if (!(start >= 1)) s.fail("start", "schedule start must be at least 1");
  if (!(growth > 1)) s.fail("growth", "schedule growth must exceed 1");
  s.finish();
  std::vector<int> out;
  for (int j = 0; j < steps; ++j) {
    int k = static_cast<int>(std::lround(start * std::pow(growth, j)));
    if (!out.empty() && k <= out.back()) k = out.back() + 1;
    out.push_back(k);
  }
  return out;
}

std::string status_of(bool undecided) { return undecided ? "undecided" : "ok"; }

CsvTable residual_table(const ConvergenceReport& r, const std::vector<int>& indices) {
  CsvTable t{{"n", "residual"}, {}};
  for (std::size_t i = 0; i < r.residuals.size(); ++i)
    t.rows.push_back({std::to_string(i < indices.size() ? indices[i] : static_cast<int>(i)), fmt(r.residuals[i])});
  return t;
}

ScenarioOutput run_renormalize(Section& cfg, const RunContext& ctx) {
  const HarmonicExpr f = cfg.harmonic("function");
  const Point p = point_from(cfg, "point", f.dim());
  EntireOptions o;
  o.steps = positive_int(cfg, "steps", o.steps);
  o.growth = cfg.number_or("growth", o.growth);
  if (!(o.growth > 1)) cfg.fail("growth", "growth must exceed 1");
  o.window = static_cast<std::size_t>(positive_int(cfg, "window", static_cast<long>(o.window)));
  read_rescaling(cfg, o.rescaling, f.dim());
  read_limit(cfg, o.limit);
  cfg.finish();

  const EntireResult r = renormalize_entire(f, p, o);
  if (ctx.verbose)
    std::cerr << "renormalize: " << r.trace.steps.size() << " steps, class " << to_string(r.report.cls) << "\n";

  ScenarioOutput out;
  out.report = to_json(r);
  out.report["function"] = f.to_string();
  out.status = status_of(r.report.cls == LimitClass::Undecided);

  const std::size_t w = std::min(o.window, r.trace.steps.size());
  std::vector<int> idx;
  for (std::size_t s = r.trace.steps.size() - w; s < r.trace.steps.size(); ++s) idx.push_back(r.trace.steps[s].n);
  out.csv.emplace_back("residuals", residual_table(r.report, idx));

  const GridSpec probe = o.rescaling.probe ? *o.rescaling.probe : default_probe(f.dim());
  CsvTable grid;
  grid.header.push_back("n");
  for (Eigen::Index i = 0; i < f.dim(); ++i) grid.header.push_back("x" + std::to_string(i + 1));
  grid.header.push_back("g");
  const auto nodes = probe.nodes();
  for (std::size_t s = r.trace.steps.size() - w; s < r.trace.steps.size(); ++s) {
    const HarmonicExpr g = f.precompose(r.original_charts[s]);
    for (const auto& x : nodes) {
      std::vector<std::string> row{std::to_string(r.trace.steps[s].n)};
      for (Eigen::Index i = 0; i < x.size(); ++i) row.push_back(fmt(x[i]));
      row.push_back(fmt(g.eval(x)));
      grid.rows.push_back(std::move(row));
    }
  }
  out.csv.emplace_back("grid", std::move(grid));
  return out;
}

ScenarioOutput run_normality(Section& cfg, const RunContext&) {
  std::vector<HarmonicExpr> members;
  if (cfg.has("members")) {
    members = cfg.harmonics("members");
  } else {
    auto d = cfg.section("dilations");
    const HarmonicExpr f = d.harmonic("expression");
    const auto factors = d.numbers("factors");
    d.finish();
    for (double k : factors) members.push_back(f.precompose(AffineChart(k, Point::Zero(f.dim()))));
  }
  const Eigen::Index dim = members.front().dim();
  for (const auto& m : members)
    if (m.dim() != dim) throw DimensionError("family members have different dimensions");
  auto bs = cfg.section("box");
  const Box K = box_from(bs, dim);
  const int ppa = positive_int(cfg, "points_per_axis", 41, 2);
  const double m_big = cfg.number_or("m_big", 1e4);
  const FamilySample fam(members, K);

  std::optional<std::tuple<double, double, double>> levelset;
  if (auto ls = cfg.optional_section("levelset")) {
    levelset.emplace(ls->number("a"), ls->number("bound"), ls->number_or("delta", 0.0));
    ls->finish();
  }
  std::optional<TabulatedBound> gradient_bound;
  if (auto gd = cfg.optional_section("gradient_bound")) {
    const auto xs = gd->numbers("xs");
    const auto ys = gd->numbers("ys");
    gd->finish();
    gradient_bound.emplace(xs, ys);
  }
  std::optional<std::tuple<double, std::vector<double>, int>> brody;
  if (auto br = cfg.optional_section("brody")) {
    const double M = br->number("bound");
    const auto half = br->numbers("half_sides");
    const int n = positive_int(*br, "points_per_axis", 101, 2);
    br->finish();
    brody.emplace(M, half, n);
  }
  cfg.finish();

  ScenarioOutput out;
  const NormalityReport marty = marty_bound(fam, K, ppa, m_big);
  out.report["marty"] = to_json(marty);
  out.report["members"] = members.size();
  if (levelset) {
    const auto [a, bound, delta] = *levelset;
    out.report["levelset"] = to_json(criterion_levelset(fam, a, K, bound, ppa, delta));
  }
  if (gradient_bound) out.report["gradient_bound"] = to_json(criterion_gradient_dominated(fam, *gradient_bound, K, ppa));
  if (brody) {
    const auto& [M, half, n] = *brody;
    out.report["brody"] = to_json(brody_verdict(members.front(), M, half, n));
  }
  return out;
}

ScenarioOutput run_tube(Section& cfg, const RunContext& ctx) {
  const DomainExpr d = cfg.domain("domain");
  TubeConfig tc;
  tc.seed = ctx.seed;
  tc.random_probes = positive_int(cfg, "random_probes", tc.random_probes, 0);
  tc.probe_max_height = cfg.number_or("probe_max_height", tc.probe_max_height);
  if (auto h = cfg.optional_section("hull")) {
    tc.hull.grid_directions = positive_int(*h, "grid_directions", tc.hull.grid_directions, 4);
    tc.hull.scales = h->numbers_or("scales", tc.hull.scales);
    h->finish();
  }
  if (auto s = cfg.optional_section("schedule")) {
    tc.schedule.max_level = positive_int(*s, "max_level", tc.schedule.max_level, 0);
    tc.schedule.samples_per_window = positive_int(*s, "samples_per_window", tc.schedule.samples_per_window, 2);
    tc.schedule.vertical_probes = positive_int(*s, "vertical_probes", tc.schedule.vertical_probes, 2);
    s->finish();
  }
  tc.witness_heights = cfg.numbers_or("witness_heights", tc.witness_heights);
  cfg.finish();

  const TubeReport r = classify_tube(d, tc);
  if (ctx.verbose)
    std::cerr << "tube: brody " << to_string(r.brody) << ", kobayashi " << to_string(r.kobayashi) << "\n";
  ScenarioOutput out;
  out.report = to_json(r);
  out.report["domain"] = d.to_string();
  out.status = status_of(r.brody == Verdict::Undecided && r.kobayashi == Verdict::Undecided);
  CsvTable ev{{"kind", "x", "y"}, {}};
  for (const auto& e : r.evidence)
    for (const auto& p : e.points) ev.rows.push_back({e.kind, fmt(p.x()), fmt(p.y())});
  out.csv.emplace_back("evidence", std::move(ev));
  return out;
}

// Deterministic uniform in [0, 1) independent of the standard library's distributions.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ScenarioOutput run_map(Section& cfg, const RunContext& ctx) {
  const HoloExpr f = cfg.holomorphic("f");
  const HoloExpr g = cfg.holomorphic("g");
  const HarmonicMap H = HarmonicMap::holomorphic_pair(f, g);
  Box box = Box::cube(2, -1.0, 1.0);
  int ppa = 21;
  if (auto gs = cfg.optional_section("grid")) {
    ppa = positive_int(*gs, "points", ppa, 2);
    if (gs->has("lo") || gs->has("hi")) box = box_from(*gs, 2);
    else gs->finish();
  }
  const GridSpec grid(box, ppa);
  const double tol = cfg.number_or("jacobian_tol", 1e-9);

  struct RenormRequest {
    Point p;
    int steps;
    double growth;
    MapRenormOptions mo;
  };
  std::optional<RenormRequest> renorm;
  if (auto rs = cfg.optional_section("renormalize")) {
    RenormRequest rq;
    rq.p = point_from(*rs, "point", 2);
    rq.steps = positive_int(*rs, "steps", 16);
    rq.growth = rs->number_or("growth", 1.5);
    if (!(rq.growth > 1)) rs->fail("growth", "growth must exceed 1");
    rq.mo.window = static_cast<std::size_t>(positive_int(*rs, "window", 5));
    read_rescaling(*rs, rq.mo.rescaling, 2);
    read_limit(*rs, rq.mo.limit);
    rs->finish();
    renorm = std::move(rq);
  }
  struct ImageRequest {
    DomainExpr d;
    int samples;
    bool product;
  };
  std::optional<ImageRequest> image;
  if (auto is = cfg.optional_section("image")) {
    DomainExpr d = is->domain("domain");
    const int samples = positive_int(*is, "samples", 10000);
    const std::string fn = is->string_or("functional", "none");
    if (fn != "none" && fn != "product") is->fail("functional", "functional must be 'none' or 'product'");
    is->finish();
    image.emplace(ImageRequest{std::move(d), samples, fn == "product"});
  }
  cfg.finish();

  ScenarioOutput out;
  out.report["map"] = {{"f", f.to_string()}, {"g", g.to_string()}};
  out.report["rank"] = to_json(rank_degenerate_probe(H, grid, 1e-9));
  try {
    out.report["holomorphy"] = to_json(holomorphy_witness(H, grid, tol));
  } catch (const PreconditionError& e) {
    out.report["holomorphy"] = {{"skipped", e.what()}};
  }

  if (renorm) {
    const double t0 = H.tilde(renorm->p);
    if (!(t0 > 0)) throw PreconditionError("map tilde derivative vanishes at the point");
    const double s0 = 1.01 * renorm->mo.rescaling.growth_threshold / t0;
    MapSequence seq = [&](int j) { return H.precompose(AffineChart(s0 * std::pow(renorm->growth, j), renorm->p)); };
    std::vector<int> idx(static_cast<std::size_t>(renorm->steps));
    for (int j = 0; j < renorm->steps; ++j) idx[static_cast<std::size_t>(j)] = j;
    const MapRenormReport mr = map_renormalize(seq, Point::Zero(2), idx, renorm->mo);
    out.report["renormalization"] = to_json(mr);
    out.report["renormalization"]["s0"] = s0;
    out.report["renormalization"]["growth"] = renorm->growth;
    if (!mr.guarantee) out.status = "undecided";
  }

  if (image) {
    std::mt19937_64 rng(ctx.seed);
    std::vector<Point> pts;
    for (int i = 0; i < image->samples; ++i) {
      Point x(2);
      for (Eigen::Index a = 0; a < 2; ++a) x[a] = box.axis(a).lo + box.axis(a).width() * unit(rng);
      pts.push_back(x);
    }
    const ImageProbe ip =
        image_probe(H, pts, image->d, image->product ? ImageFunctional::Product : ImageFunctional::None);
    out.report["image"] = to_json(ip);
    CsvTable v{{"x", "y", "u", "v"}, {}};
    for (const auto& [src, img] : ip.violations)
      v.rows.push_back({fmt(src[0]), fmt(src[1]), fmt(img.x()), fmt(img.y())});
    out.csv.emplace_back("image_violations", std::move(v));
  }
  return out;
}

ScenarioOutput run_torus(Section& cfg, const RunContext& ctx) {
  std::vector<HarmonicExpr> comps;
  std::optional<std::pair<HoloExpr, HoloExpr>> pair;
  if (cfg.has("lift")) {
    comps = cfg.harmonics("lift");
  } else {
    auto ps = cfg.section("pair");
    pair.emplace(ps.holomorphic("f"), ps.holomorphic("g"));
    ps.finish();
  }
  const HarmonicMap G = pair ? HarmonicMap::holomorphic_pair(pair->first, pair->second) : HarmonicMap(comps);
  const Eigen::Index m = G.source_dim();
  const Point p = point_from(cfg, "point", m);
  const bool adjust = cfg.boolean_or("adjust_constants", false);
  const std::vector<int> idx = read_schedule(cfg);
  GroupRenormOptions go;
  go.window = static_cast<std::size_t>(positive_int(cfg, "window", 5));
  read_rescaling(cfg, go.rescaling, m);
  read_limit(cfg, go.limit);
  cfg.finish();

  // The family G_k(x) = G(k x).
  auto member = [&](int k) { return G.precompose(AffineChart(static_cast<double>(k), Point::Zero(m))); };
  ScenarioOutput out;
  if (adjust) {
    const ConstantAdjustedResult r = constant_adjusted_renormalize(member, p, idx, go);
    out.report = to_json(r);
    out.status = status_of(r.limit.cls == ComponentClass::Undecided);
  } else {
    const TorusRenormResult r = torus_renormalize([&](int k) { return TorusMap{member(k)}; }, p, idx, go);
    out.report = to_json(r);
    out.status = status_of(r.limit.cls == ComponentClass::Undecided);
  }
  if (ctx.verbose) std::cerr << "torus: " << out.report["limit"]["class"].get<std::string>() << "\n";
  CsvTable t{{"window_step", "residual"}, {}};
  const auto& res = out.report["limit"]["residuals"];
  for (std::size_t i = 0; i < res.size(); ++i) t.rows.push_back({std::to_string(i), res[i].dump()});
  out.csv.emplace_back("residuals", std::move(t));
  return out;
}

CMatrix random_matrix(std::mt19937_64& rng, Eigen::Index n) {
  CMatrix M(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = Complex(2.0 * unit(rng) - 1.0, 2.0 * unit(rng) - 1.0);
  return M;
}

ScenarioOutput run_lie(Section& cfg, const RunContext& ctx) {
  const std::vector<int> idx = read_schedule(cfg);
  LieOptions lo;
  lo.probe_points = positive_int(cfg, "probe_points", lo.probe_points, 2);
  read_rescaling(cfg, lo.rescaling, 2);
  Complex p(0.0, 0.0);
  if (cfg.has("point")) {
    const Point q = point_from(cfg, "point", 2);
    p = Complex(q[0], q[1]);
  }
  ScenarioOutput out;
  if (cfg.has("matrix")) {
    const MatrixHoloMap F = cfg.matrix("matrix");
    cfg.finish();
    // The family F_k(z) = F(k z).
    const LieRenormReport r =
        lie_renormalize([&](int k) { return F.precompose(static_cast<double>(k), 0.0); }, p, idx, lo);
    out.report = to_json(r);
    out.report["matrix"] = F.to_string();
    out.status = status_of(!r.nonconstant);
    return out;
  }
  auto ss = cfg.section("synthetic");
  const int n = positive_int(ss, "n", 2);
  const int trials = positive_int(ss, "trials", 5);
  ss.finish();
  cfg.finish();
  std::mt19937_64 rng(ctx.seed);
  out.report["runs"] = Json::array();
  CsvTable t{{"trial", "x_error", "residual", "df_constancy"}, {}};
  for (int i = 0; i < trials; ++i) {
    const CMatrix g = random_matrix(rng, n);
    CMatrix X = random_matrix(rng, n);
    X /= X.norm();  // the rescaling normalizes |DU| to 1, so unit generators are recovered exactly
    const MatrixHoloMap base = exp_family(g, X, 1.0);
    const LieRenormReport r =
        lie_renormalize([&](int k) { return base.precompose(static_cast<double>(k), 0.0); }, p, idx, lo);
    const double err = (r.X - X).norm();
    Json j = to_json(r);
    j["X_true"] = to_json(X);
    j["g_true"] = to_json(g);
    j["x_error"] = err;
    out.report["runs"].push_back(j);
    t.rows.push_back({std::to_string(i), fmt(err), fmt(r.residual), fmt(r.df_constancy)});
    if (ctx.verbose) std::cerr << "lie trial " << i << ": |X_est - X| = " << err << "\n";
  }
  out.csv.emplace_back("recovery", std::move(t));
  return out;
}

}  // namespace

const std::vector<std::string>& scenario_kinds() {
  static const std::vector<std::string> kinds{"renormalize", "normality", "tube_classify", "map_analysis", "torus",
                                              "lie"};
  return kinds;
}

ScenarioOutput run_scenario(const std::string& kind, Section& cfg, const RunContext& ctx) {
  if (kind == "renormalize") return run_renormalize(cfg, ctx);
  if (kind == "normality") return run_normality(cfg, ctx);
  if (kind == "tube_classify") return run_tube(cfg, ctx);
  if (kind == "map_analysis") return run_map(cfg, ctx);
  if (kind == "torus") return run_torus(cfg, ctx);
  if (kind == "lie") return run_lie(cfg, ctx);
  cfg.fail("kind", "unknown scenario kind '" + kind + "'");
}

}  // namespace rltool
