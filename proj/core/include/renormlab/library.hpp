#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "renormlab/domain_expr.hpp"
#include "renormlab/harmonic_expr.hpp"

namespace renormlab {

struct CatalogEntry {
  std::string name;
  std::string kind;  ///< "expression", "curve" or "domain"
  std::string text;  ///< definition in the config grammar
  std::string description;
};

/// Built-in objects usable by name in configs. Order is stable.
const std::vector<CatalogEntry>& catalog();

std::optional<DomainExpr> catalog_domain(std::string_view name);
std::optional<HarmonicExpr> catalog_expression(std::string_view name);
std::optional<Curve> catalog_curve(std::string_view name);

/// Catalog domains as constructed objects.
DomainExpr exp_cusp();           ///< 0 < y < exp(-|x|)
DomainExpr strip();              ///< 0 < y < 1
DomainExpr parabola_epigraph();  ///< y > x^2
DomainExpr upper_half_plane();   ///< y > 0
/// Union of three half-strips {x > -1, |y| < width} turned by 0, 120 and 240 degrees.
DomainExpr three_spike(double width = 0.25);
/// {0 < xy < 1} together with the square |x|, |y| < 1/4.
DomainExpr w_standin();

}  // namespace renormlab
