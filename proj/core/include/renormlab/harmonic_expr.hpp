#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "renormlab/geometry.hpp"
#include "renormlab/holo_expr.hpp"
#include "renormlab/sexpr.hpp"

namespace renormlab {

struct ValueGradient {
  double value = 0.0;
  Eigen::VectorXd gradient;
};

/// One term c * x^alpha of a polynomial on R^m.
struct Monomial {
  double coefficient = 0.0;
  std::vector<int> exponents;
};

/// Harmonic function on R^m as an immutable expression tree.
///
/// Every constructor yields a harmonic function, so no runtime PDE check is
/// needed: coordinates, constants, sums, real multiples, harmonic polynomials
/// (symbolic Laplacian verified to vanish), Re/Im of a holomorphic expression
/// (m = 2), Poisson kernels of balls, exponential waves
/// e^{<a,x>} cos(<b,x> + phase) with |a| = |b| and a orthogonal to b, and
/// precomposition with a scale-and-translate chart.
///
/// Text form (one node per list):
///   (coord M I) (const M C) (sum E ...) (scale K E)
///   (hpoly M (C e_1 ... e_M) ...) (re H) (im H)
///   (chart S (c_1 ... c_M) E) (poisson (z_1 ... z_M)) (expwave (a ...) (b ...) PHASE)
class HarmonicExpr {
public:
  HarmonicExpr() = delete;

  static HarmonicExpr coordinate(Eigen::Index dim, Eigen::Index axis);
  static HarmonicExpr constant(Eigen::Index dim, double c);
  /// x -> c + <gradient, x>.
  static HarmonicExpr affine(double c, const Eigen::VectorXd& gradient);
  /// Throws PreconditionError unless the symbolic Laplacian vanishes.
  static HarmonicExpr harmonic_polynomial(Eigen::Index dim, std::vector<Monomial> terms);
  static HarmonicExpr real_part(const HoloExpr& h);
  static HarmonicExpr imag_part(const HoloExpr& h);
  /// Poisson kernel of the ball B(0, |zeta|) with pole at the boundary point zeta,
  /// normalized to value 1 at the origin. Positive inside the ball.
  static HarmonicExpr poisson_kernel(const Point& zeta);
  static HarmonicExpr exp_wave(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double phase);

  friend HarmonicExpr operator+(const HarmonicExpr& lhs, const HarmonicExpr& rhs);
  friend HarmonicExpr operator-(const HarmonicExpr& lhs, const HarmonicExpr& rhs);
  friend HarmonicExpr operator*(double k, const HarmonicExpr& e);

  /// x -> this(chart(x)). Nested charts are folded into one.
  HarmonicExpr precompose(const AffineChart& chart) const;

  Eigen::Index dim() const;

  /// Throws DimensionError on mismatch and NumericError on overflow.
  double eval(const Point& x) const;
  ValueGradient eval_with_gradient(const Point& x) const;

  /// The holomorphic expression h when this node is Re h (or Im h).
  std::optional<HoloExpr> holomorphic_parent() const;
  bool is_imaginary_part() const;

  std::string to_string() const;
  static HarmonicExpr parse(std::string_view text);
  static HarmonicExpr from_sexpr(const SExpr& e);

  struct Node;

private:
  explicit HarmonicExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace renormlab
