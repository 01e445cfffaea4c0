#include "renormlab/report_json.hpp"

#include <cmath>

namespace renormlab {

namespace {

// JSON has no infinities; keep them readable instead of emitting null.
Json num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

Json vec2(const Vec2& v) { return Json::array({num(v.x()), num(v.y())}); }

Json line(const Line& l) { return {{"origin", vec2(l.origin)}, {"dir", vec2(l.dir)}}; }

Json cplx(Complex c) { return Json::array({num(c.real()), num(c.imag())}); }

}  // namespace

Json to_json(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(num(v[i]));
  return out;
}

Json to_json(const Eigen::MatrixXd& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_json(Eigen::VectorXd(m.row(i).transpose())));
  return out;
}

Json to_json(const CMatrix& m) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(cplx(m(i, j)));
    out.push_back(row);
  }
  return out;
}

Json to_json(const RenormStep& s) {
  return {{"n", s.n},
          {"a", num(s.chart.scale)},
          {"b", to_json(s.chart.center)},
          {"eps", num(s.eps)},
          {"tau", num(s.tau)},
          {"phi_start", num(s.phi_start)},
          {"phi_selected", num(s.phi_selected)},
          {"gtilde0", num(s.gtilde0)},
          {"sup_bound", num(s.sup_bound)},
          {"delta_grid", num(s.delta_grid)},
          {"probe_certified", s.probe_certified},
          {"iterations", s.iterations},
          {"points_per_radius", s.points_per_radius},
          {"exhaustive", s.exhaustive}};
}

Json to_json(const RenormTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) steps.push_back(to_json(s));
  return {{"base", to_json(t.base)}, {"steps", steps}};
}

Json to_json(const ConvergenceReport& r) {
  Json out = {{"class", to_string(r.cls)}, {"window", r.window}};
  Json res = Json::array(), gaps = Json::array();
  for (double v : r.residuals) res.push_back(num(v));
  for (double v : r.gaps) gaps.push_back(num(v));
  out["residuals"] = res;
  out["gaps"] = gaps;
  if (r.affine) out["affine"] = {{"c", num(r.affine->constant)}, {"v", to_json(r.affine->gradient)}};
  else out["affine"] = nullptr;
  return out;
}

Json to_json(const EntireResult& r) {
  Json params = Json::array(), charts = Json::array();
  for (double s : r.parameters) params.push_back(num(s));
  for (const auto& c : r.original_charts) charts.push_back({{"A", num(c.scale)}, {"B", to_json(c.center)}});
  return {{"trace", to_json(r.trace)}, {"report", to_json(r.report)}, {"parameters", params},
          {"original_charts", charts}};
}

Json to_json(const Witness& w) {
  return {{"index", w.index}, {"point", to_json(w.point)}, {"value", num(w.value)}};
}

Json to_json(const NormalityReport& r) {
  return {{"sup", num(r.sup)},
          {"verdict", to_string(r.verdict)},
          {"witness", r.witness ? to_json(*r.witness) : Json(nullptr)},
          {"argmax", to_json(r.argmax)}};
}

Json to_json(const CriterionReport& r) {
  Json v = Json::array();
  for (const auto& w : r.violations) v.push_back(to_json(w));
  return {{"pass", r.pass}, {"vacuous", r.vacuous}, {"tested", r.tested}, {"violations", v}};
}

Json to_json(const BrodyReport& r) {
  Json out = {{"verdict", to_string(r.verdict)}, {"sup", num(r.sup)}, {"one_sided", r.one_sided}};
  out["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  if (r.fit)
    out["fit"] = {{"c", num(r.fit->fit.constant)}, {"v", to_json(r.fit->fit.gradient)},
                  {"residual", num(r.fit->residual)}};
  else out["fit"] = nullptr;
  return out;
}

Json to_json(const Evidence& e) {
  Json pts = Json::array();
  for (const auto& p : e.points) pts.push_back(vec2(p));
  return {{"kind", e.kind}, {"detail", e.detail}, {"points", pts}};
}

Json to_json(const HullResult& h) {
  Json out = {{"class", to_string(h.cls)}};
  if (h.cls == HullClass::InHalfPlane) {
    out["normal"] = vec2(h.normal);
    out["offset"] = num(h.offset);
  }
  if (h.cls == HullClass::FullPlane) {
    Json v = Json::array();
    for (const auto& p : h.hull_vertices) v.push_back(vec2(p));
    out["hull_vertices"] = v;
    out["disk_radius"] = num(h.disk_radius);
  }
  return out;
}

Json to_json(const EscapeResult& e) {
  Json vars = Json::array(), lines = Json::array();
  for (const auto& v : e.variants)
    vars.push_back({{"name", v.name}, {"holds", v.holds}, {"literal", v.literal}, {"coverage", num(v.coverage)}});
  for (const auto& l : e.adherent_lines) lines.push_back(line(l));
  return {{"class", to_string(e.cls)},
          {"adherent_line", e.adherent_line ? line(*e.adherent_line) : Json(nullptr)},
          {"adherent_lines", lines},
          {"best_line_gap", num(e.best_line_gap)},
          {"variants", vars}};
}

Json to_json(const TubeReport& r) {
  Json ev = Json::array();
  for (const auto& e : r.evidence) ev.push_back(to_json(e));
  Json out = {{"hull", to_json(r.hull)},
              {"brody", to_string(r.brody)},
              {"kobayashi", to_string(r.kobayashi)},
              {"evidence", ev}};
  if (r.line)
    out["line"] = {{"answer", to_string(r.line->answer)},
                   {"witness", r.line->witness ? line(*r.line->witness) : Json(nullptr)}};
  if (r.escape) out["escape"] = to_json(*r.escape);
  if (r.normalized) out["normalized"] = *r.normalized;
  return out;
}

Json to_json(const RankProbe& r) {
  Json out = {{"degenerate", r.degenerate}, {"max_minor", num(r.max_minor)}, {"witness", to_json(r.witness)}};
  if (r.degenerate) {
    out["single_point"] = r.single_point;
    out["line_residual"] = num(r.line_residual);
    out["line_point"] = to_json(r.line_point);
    out["line_dir"] = to_json(r.line_dir);
  }
  return out;
}

Json to_json(const HolomorphyWitness& w) {
  return {{"nonnegative_jacobian", w.nonnegative_jacobian},
          {"min_jacobian", num(w.min_jacobian)},
          {"jacobian_witness", to_json(w.jacobian_witness)},
          {"c", cplx(w.c)},
          {"shift", cplx(w.shift)},
          {"residual", num(w.residual)},
          {"recombination", to_json(Eigen::MatrixXd(w.recombination))},
          {"invertible", w.invertible},
          {"grid_limited", w.grid_limited}};
}

Json to_json(const MapRenormReport& r) {
  Json comps = Json::array(), reps = Json::array();
  for (auto c : r.components) comps.push_back(to_string(c));
  for (const auto& c : r.reports) reps.push_back(to_json(c));
  return {{"trace", to_json(r.trace)}, {"components", comps}, {"reports", reps}, {"guarantee", r.guarantee}};
}

Json to_json(const ImageProbe& p) {
  Json v = Json::array();
  for (const auto& [src, img] : p.violations)
    v.push_back({{"source", to_json(src)}, {"image", vec2(img)}});
  return {{"total", p.total},
          {"inside", p.inside},
          {"violations", v},
          {"functional_min", num(p.functional_min)},
          {"functional_max", num(p.functional_max)}};
}

Json to_json(const AffineLimitReport& r) {
  Json res = Json::array();
  for (double v : r.residuals) res.push_back(num(v));
  return {{"class", to_string(r.cls)},
          {"linear", to_json(r.linear)},
          {"constant", to_json(r.constant)},
          {"residual", num(r.residual)},
          {"derivative_spread", num(r.derivative_spread)},
          {"residuals", res}};
}

Json to_json(const TorusRenormResult& r) { return {{"trace", to_json(r.trace)}, {"limit", to_json(r.limit)}}; }

Json to_json(const ConstantAdjustedResult& r) {
  Json shifts = Json::array(), comps = Json::array();
  for (const auto& c : r.shifts) shifts.push_back(to_json(c));
  for (auto c : r.components) comps.push_back(to_string(c));
  return {{"trace", to_json(r.trace)}, {"shifts", shifts}, {"components", comps}, {"limit", to_json(r.limit)}};
}

Json to_json(const LieRenormReport& r) {
  return {{"trace", to_json(r.trace)},
          {"g", to_json(r.g)},
          {"anchor", to_json(r.anchor)},
          {"X", to_json(r.X)},
          {"residual", num(r.residual)},
          {"df_constancy", num(r.df_constancy)},
          {"nonconstant", r.nonconstant}};
}

}  // namespace renormlab
