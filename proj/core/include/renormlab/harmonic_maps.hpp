#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "renormlab/domain_expr.hpp"
#include "renormlab/harmonic_expr.hpp"
#include "renormlab/holo_expr.hpp"
#include "renormlab/renorm_engine.hpp"

namespace renormlab {

/// Map R^n -> R^m with harmonic coordinates. For the holomorphic-pair case
/// (Re f, Re g) the parents f and g are kept for exact complex derivatives.
class HarmonicMap {
public:
  explicit HarmonicMap(std::vector<HarmonicExpr> components);
  /// The map z -> (Re f(z), Re g(z)) on R^2.
  static HarmonicMap holomorphic_pair(const HoloExpr& f, const HoloExpr& g);

  const std::vector<HarmonicExpr>& components() const { return components_; }
  Eigen::Index source_dim() const { return components_.front().dim(); }
  std::size_t target_dim() const { return components_.size(); }
  const std::optional<std::pair<HoloExpr, HoloExpr>>& parents() const { return parents_; }

  Eigen::VectorXd eval(const Point& x) const;
  /// Rows are component gradients.
  Eigen::MatrixXd differential(const Point& x) const;
  /// Sum of the component tilde derivatives.
  double tilde(const Point& x) const;
  HarmonicMap precompose(const AffineChart& chart) const;

private:
  std::vector<HarmonicExpr> components_;
  std::optional<std::pair<HoloExpr, HoloExpr>> parents_;
};

/// Im(f'(z) conj(g'(z))) for a holomorphic pair; equals det dH(z).
double jacobian(const HarmonicMap& H, const Point& z);

struct RankProbe {
  bool degenerate = false;
  double max_minor = 0.0;
  Point witness;             ///< node with the largest 2x2 minor
  double line_residual = 0.0;///< degenerate: max distance of the image cloud to its principal line
  bool single_point = false; ///< degenerate: the image cloud is one point
  Eigen::VectorXd line_point;
  Eigen::VectorXd line_dir;
};

/// All 2x2 minors of dH below 1e-9 on the grid gives a degenerate report with a
/// total-least-squares line through the image cloud; otherwise a full-rank witness.
RankProbe rank_degenerate_probe(const HarmonicMap& H, const GridSpec& grid, double minor_tol = 1e-9);

struct HolomorphyWitness {
  bool nonnegative_jacobian = true;
  Point jacobian_witness;      ///< most negative Jacobian when not nonnegative
  double min_jacobian = 0.0;
  Complex c;                   ///< f'/g' at the node maximizing |g'|
  Complex shift;               ///< f - c g at that node
  double residual = 0.0;       ///< sup |f' - c g'| over the grid
  Eigen::Matrix2d recombination = Eigen::Matrix2d::Zero();  ///< (Re g, Im g) -> (Re f, Re g)
  bool invertible = false;
  /// Grid nonnegativity is not global nonnegativity; the residual is the evidence.
  bool grid_limited = true;
};

HolomorphyWitness holomorphy_witness(const HarmonicMap& H, const GridSpec& grid, double jac_tol = 1e-9);

enum class ComponentClass { AffineNonconstant, AffineConstant, PlusInfinity, MinusInfinity, Undecided };
std::string to_string(ComponentClass c);

struct MapRenormOptions {
  RescalingOptions rescaling;
  LimitOptions limit;
  std::size_t window = 5;
};

struct MapRenormReport {
  RenormTrace trace;
  std::vector<ComponentClass> components;
  std::vector<ConvergenceReport> reports;
  bool guarantee = false;  ///< at least one AffineNonconstant component
};

using MapSequence = std::function<HarmonicMap(int)>;

/// Rescales with phi_k = map tilde at the fixed point p and classifies every
/// rescaled component on the probe grid.
MapRenormReport map_renormalize(const MapSequence& Hseq, const Point& p, const std::vector<int>& indices,
                                const MapRenormOptions& opts = {});

enum class ImageFunctional { None, Product };

struct ImageProbe {
  std::size_t total = 0;
  std::size_t inside = 0;
  std::vector<std::pair<Point, Eigen::Vector2d>> violations;  ///< (source, image)
  double functional_min = 0.0;
  double functional_max = 0.0;
  Point argmin;
  Point argmax;
};

ImageProbe image_probe(const HarmonicMap& H, const std::vector<Point>& samples, const DomainExpr& d,
                       ImageFunctional functional = ImageFunctional::None, std::size_t max_violations = 100);

}  // namespace renormlab
