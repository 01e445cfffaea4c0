#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "renormlab/harmonic_maps.hpp"
#include "renormlab/holo_expr.hpp"
#include "renormlab/renorm_engine.hpp"

namespace renormlab {

using CMatrix = Eigen::MatrixXcd;

/// Map into the torus R^n / Z^n given by a lift into R^n, defined up to
/// additive constants. Only derivatives of the lift are used for rescaling.
struct TorusMap {
  HarmonicMap lift;
  std::size_t target_dim() const { return lift.target_dim(); }
};

/// Distance in R^n / Z^n: norm of the difference reduced to the nearest lattice translate.
double quotient_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// Frobenius norm of the differential of a map.
double differential_norm(const HarmonicMap& H, const Point& x);

struct AffineLimitReport {
  ComponentClass cls = ComponentClass::Undecided;
  Eigen::MatrixXd linear;       ///< mean derivative on the probe at the last step
  Eigen::VectorXd constant;     ///< value at 0 of the last rescaled map (reduced mod Z^n for tori)
  double residual = 0.0;        ///< sup distance to the affine limit on the probe, last step
  double derivative_spread = 0.0;  ///< sup |DG - linear| on the probe, last step
  std::vector<double> residuals;   ///< per window step
};

struct GroupRenormOptions {
  RescalingOptions rescaling;
  LimitOptions limit;
  std::size_t window = 5;
};

struct TorusRenormResult {
  RenormTrace trace;
  AffineLimitReport limit;
};

using TorusSequence = std::function<TorusMap(int)>;

/// Rescales with phi = |F'| (Frobenius) at the fixed point p; the limit is an
/// affine map mod Z^n measured in the quotient metric.
TorusRenormResult torus_renormalize(const TorusSequence& seq, const Point& p, const std::vector<int>& indices,
                                    const GroupRenormOptions& opts = {});

struct ConstantAdjustedResult {
  RenormTrace trace;
  std::vector<Eigen::VectorXd> shifts;  ///< c_k = -f_k(b_k), one per step
  std::vector<ComponentClass> components;
  AffineLimitReport limit;
};

/// Rescaling of maps into R^n followed by the shift c_k = -f_k(b_k), so the
/// shifted rescaled maps vanish at 0.
ConstantAdjustedResult constant_adjusted_renormalize(const MapSequence& seq, const Point& p,
                                                     const std::vector<int>& indices,
                                                     const GroupRenormOptions& opts = {});

/// Holomorphic map C -> M_n(C) with entrywise expressions.
class MatrixHoloMap {
public:
  MatrixHoloMap(Eigen::Index n, std::vector<HoloExpr> row_major);

  Eigen::Index n() const { return n_; }
  const std::vector<HoloExpr>& entries() const { return entries_; }
  CMatrix value(Complex z) const;
  /// Entrywise exact derivative.
  CMatrix derivative(Complex z) const;
  MatrixHoloMap precompose(Complex a, Complex b) const;  ///< z -> F(a z + b)

  std::string to_string() const;  ///< (matrix N H11 H12 ... HNN)
  static MatrixHoloMap parse(std::string_view text);
  static MatrixHoloMap from_sexpr(const SExpr& e);

private:
  Eigen::Index n_;
  std::vector<HoloExpr> entries_;
};

/// F(z)^-1 F'(z). Throws SingularMatrixError when |det F(z)| <= 1e-12 |F(z)|^n.
CMatrix matrix_Df(const MatrixHoloMap& F, Complex z);

/// exp(z X).
CMatrix expm(const CMatrix& X, Complex z);

/// The family z -> g exp(s z X) written entrywise through an eigendecomposition
/// of X (X must be diagonalizable).
MatrixHoloMap exp_family(const CMatrix& g, const CMatrix& X, Complex s);

struct LieRenormReport {
  RenormTrace trace;
  CMatrix g;             ///< limit anchor: identity after normalizing U_k(0) = I
  CMatrix anchor;        ///< F_k(b_k) at the last step, so F_k(a z + b) ~ anchor exp(z X)
  CMatrix X;             ///< probe mean of DU at the last step
  double residual = 0.0;        ///< sup |U(z) - exp(z X)| on the probe
  double df_constancy = 0.0;    ///< sup |DU(z) - X| on the probe
  bool nonconstant = false;     ///< |X| >= 1e-3
};

struct LieOptions {
  RescalingOptions rescaling;
  int probe_points = 11;  ///< per axis on [-1, 1]^2
};

using MatrixSequence = std::function<MatrixHoloMap(int)>;

/// Rescales with phi = |DF| (Frobenius), normalizes U_k(z) = F_k(b_k)^-1 F_k(a_k z + b_k)
/// and extracts X from the probe mean of DU.
LieRenormReport lie_renormalize(const MatrixSequence& seq, Complex p, const std::vector<int>& indices,
                                const LieOptions& opts = {});

}  // namespace renormlab
