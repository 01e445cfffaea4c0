#include "renormlab/library.hpp"

#include <cmath>
#include <numbers>

namespace renormlab {

namespace {

Mat2 rotation(double degrees) {
  const double t = degrees * std::numbers::pi / 180.0;
  Mat2 R;
  R << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return R;
}

const CatalogEntry* find(std::string_view name, std::string_view kind) {
  for (const auto& e : catalog()) {
    if (e.name == name && e.kind == kind) return &e;
  }
  return nullptr;
}

}  // namespace

DomainExpr exp_cusp() {
  return DomainExpr::intersect({DomainExpr::above(Curve::constant(0.0)), DomainExpr::below(Curve::exp_abs(1.0, 0.0))});
}

DomainExpr strip() {
  return DomainExpr::intersect({DomainExpr::above(Curve::constant(0.0)), DomainExpr::below(Curve::constant(1.0))});
}

DomainExpr parabola_epigraph() { return DomainExpr::above(Curve::parabola(1.0, 0.0)); }

DomainExpr upper_half_plane() { return DomainExpr::above(Curve::constant(0.0)); }

DomainExpr three_spike(double width) {
  const DomainExpr arm = DomainExpr::intersect({DomainExpr::half_plane(1.0, 0.0, 1.0),
                                                DomainExpr::above(Curve::constant(-width)),
                                                DomainExpr::below(Curve::constant(width))});
  std::vector<DomainExpr> arms;
  for (double deg : {0.0, 120.0, 240.0}) {
    arms.push_back(deg == 0.0 ? arm : DomainExpr::affine_image(rotation(deg), Vec2::Zero(), arm));
  }
  return DomainExpr::unite(std::move(arms));
}

DomainExpr w_standin() {
  const DomainExpr quadrant = DomainExpr::intersect({DomainExpr::half_plane(1.0, 0.0, 0.0),
                                                     DomainExpr::half_plane(0.0, 1.0, 0.0),
                                                     DomainExpr::below(Curve::hyperbola(1.0))});
  const DomainExpr square = DomainExpr::intersect({DomainExpr::vertical_strip(-0.25, 0.25),
                                                   DomainExpr::above(Curve::constant(-0.25)),
                                                   DomainExpr::below(Curve::constant(0.25))});
  return DomainExpr::unite({quadrant, DomainExpr::affine_image(-Mat2::Identity(), Vec2::Zero(), quadrant), square});
}

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries = [] {
    std::vector<CatalogEntry> v;
    auto add_expr = [&](std::string name, std::string text, std::string desc) {
      v.push_back({std::move(name), "expression", std::move(text), std::move(desc)});
    };
    add_expr("coord_x", "(coord 2 0)", "x_1 on R^2");
    add_expr("re_z2", "(re (mul z z))", "Re z^2 = x^2 - y^2");
    add_expr("im_z2", "(im (mul z z))", "Im z^2 = 2xy");
    add_expr("re_z3", "(re (poly (0 0) (0 0) (0 0) (1 0)))", "Re z^3");
    add_expr("re_exp", "(re (exp z))", "Re e^z = e^x cos y");
    add_expr("re_exp_neg", "(re (exp (mul (c -1 0) z)))", "Re e^{-z} = e^{-x} cos y");
    add_expr("re_z2_plus_exp", "(re (add (mul z z) (exp z)))", "Re(z^2 + e^z)");
    add_expr("poisson_2d", "(poisson (2 0))", "Poisson kernel of B(0, 2) with pole (2, 0), value 1 at 0");
    add_expr("wave_3d", "(expwave (1 0 0) (0 1 0) 0)", "e^{x_1} cos x_2 on R^3");

    auto add_curve = [&](std::string name, const Curve& c, std::string desc) {
      v.push_back({std::move(name), "curve", c.to_string(), std::move(desc)});
    };
    add_curve("exp_abs", Curve::exp_abs(1.0, 0.0), "exp(-|x|)");
    add_curve("unit_hyperbola", Curve::hyperbola(1.0), "1/x on x > 0");
    add_curve("unit_parabola", Curve::parabola(1.0, 0.0), "x^2");

    auto add_domain = [&](std::string name, const DomainExpr& d, std::string desc) {
      v.push_back({std::move(name), "domain", d.to_string(), std::move(desc)});
    };
    add_domain("exp_cusp", exp_cusp(), "0 < y < exp(-|x|)");
    add_domain("strip", strip(), "0 < y < 1");
    add_domain("parabola_epigraph", parabola_epigraph(), "y > x^2");
    add_domain("upper_half_plane", upper_half_plane(), "y > 0");
    add_domain("three_spike", three_spike(), "thin neighbourhood of three half-lines from the origin at 120 degrees");
    add_domain("w_standin", w_standin(), "0 < xy < 1 with a small square around the origin");
    return v;
  }();
  return entries;
}

std::optional<DomainExpr> catalog_domain(std::string_view name) {
  if (const auto* e = find(name, "domain")) return DomainExpr::parse(e->text);
  return std::nullopt;
}

std::optional<HarmonicExpr> catalog_expression(std::string_view name) {
  if (const auto* e = find(name, "expression")) return HarmonicExpr::parse(e->text);
  return std::nullopt;
}

std::optional<Curve> catalog_curve(std::string_view name) {
  if (const auto* e = find(name, "curve")) return Curve::from_sexpr(parse_sexpr(e->text));
  return std::nullopt;
}

}  // namespace renormlab
