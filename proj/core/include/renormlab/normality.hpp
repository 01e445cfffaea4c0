#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "renormlab/field_ops.hpp"
#include "renormlab/geometry.hpp"
#include "renormlab/harmonic_expr.hpp"

namespace renormlab {

/// Finite sample of a family of harmonic functions on a common box.
struct FamilySample {
  std::vector<HarmonicExpr> members;
  Box domain;

  FamilySample(std::vector<HarmonicExpr> members, Box domain);
  Eigen::Index dim() const { return domain.dim(); }
};

struct Witness {
  std::size_t index = 0;
  Point point;
  double value = 0.0;  ///< the offending quantity at the point
};

enum class NormalityVerdict { BoundedDerivative, UnboundedDerivative };
std::string to_string(NormalityVerdict v);

struct NormalityReport {
  double sup = 0.0;
  NormalityVerdict verdict = NormalityVerdict::BoundedDerivative;
  std::optional<Witness> witness;  ///< present iff the verdict is UnboundedDerivative
  Witness argmax;                  ///< where the sup was attained
};

/// Sup of the tilde derivative over all members and grid nodes of K.
/// UnboundedDerivative when the sup exceeds m_big.
NormalityReport marty_bound(const FamilySample& fam, const Box& K, int points_per_axis, double m_big = 1e4);

struct CriterionReport {
  bool pass = true;
  bool vacuous = false;       ///< no sample fell in the tested set
  std::size_t tested = 0;
  std::vector<Witness> violations;
};

/// Checks |grad f| <= M_K on the numeric level set |f - a| <= delta inside K.
/// A nonpositive delta means 1e-3 times the range of each member on K.
CriterionReport criterion_levelset(const FamilySample& fam, double a, const Box& K, double M_K, int points_per_axis,
                                   double delta = 0.0);

/// A function [-inf, inf] -> [0, inf] given by a table; linear between
/// nodes, constant beyond the ends. Infinite table values are allowed and
/// make every neighbouring interval infinite.
class TabulatedBound {
public:
  TabulatedBound(std::vector<double> xs, std::vector<double> ys);
  static TabulatedBound constant(double c);
  double operator()(double t) const;
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

private:
  std::vector<double> xs_;
  std::vector<double> ys_;
};

/// Checks |grad f(x)| <= l(f(x)) on the grid of K.
CriterionReport criterion_gradient_dominated(const FamilySample& fam, const TabulatedBound& l, const Box& K,
                                             int points_per_axis);

enum class BrodyClass { ConsistentWithBrody, Refuted };
std::string to_string(BrodyClass c);

struct BrodyReport {
  BrodyClass verdict = BrodyClass::ConsistentWithBrody;
  double sup = 0.0;
  std::optional<AffineFit> fit;     ///< on the largest box, when consistent
  std::optional<Witness> witness;   ///< when refuted
  /// Consistency is one-sided evidence: the scan can refute but never prove.
  bool one_sided = true;
};

/// Scans the tilde derivative of an entire f over nested centered cubes of the
/// given half-sides. Refuted at the first sample above M; otherwise reports the
/// affine fit on the largest cube. The largest side must be at least 100.
BrodyReport brody_verdict(const HarmonicExpr& f, double M, const std::vector<double>& half_sides,
                          int points_per_axis = 101);

}  // namespace renormlab
