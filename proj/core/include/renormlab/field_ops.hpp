#pragma once

#include <cstddef>
#include <functional>

#include "renormlab/geometry.hpp"
#include "renormlab/harmonic_expr.hpp"

namespace renormlab {

using ScalarField = std::function<double(const Point&)>;

double eval(const HarmonicExpr& f, const Point& x);
Eigen::VectorXd gradient(const HarmonicExpr& f, const Point& x);

/// log(cosh t) without overflow: |t| + log1p(exp(-2|t|)) - log 2.
double log_cosh(double t);

/// The Marty-type derivative |grad f(x)| / cosh f(x), evaluated in the log
/// domain so that it stays finite for |f| far beyond the range of cosh.
double tilde_derivative(const HarmonicExpr& f, const Point& x);
double tilde_from(double value, double gradient_norm);

/// Mean of `field` over the sphere |x| = r in R^dim under the uniform
/// probability measure. `order` controls the rule: 2*order equispaced nodes on
/// circles and `order` Gauss-Gegenbauer nodes per polar angle.
double spherical_mean(const ScalarField& field, Eigen::Index dim, double r, int order = 16);

struct HarnackReport {
  bool pass = false;
  double constant = 0.0;     ///< A = 3^-m
  double worst_ratio = 0.0;  ///< min f / max f over the sampled inner ball
  double min_value = 0.0;
  double max_value = 0.0;
  Point argmin;
  Point argmax;
  std::size_t inner_samples = 0;
  std::size_t outer_samples = 0;
};

/// Checks A f(x) <= f(y) over all sampled x, y in the closed ball B(p, R),
/// with A = 3^-m. Grid nodes of `sample` inside the open ball B(p, 2R) are
/// used to check positivity; a nonpositive value is a PreconditionError.
HarnackReport harnack_check(const HarmonicExpr& f, const Point& p, double R, const GridSpec& sample);

double harnack_constant(Eigen::Index dim);

struct AffineFit {
  AffineFunc fit;
  double residual = 0.0;  ///< max over grid of |f - fit|
};

/// Least-squares affine fit over the grid nodes.
AffineFit affine_fit(const ScalarField& field, const GridSpec& grid);
/// Same, from values already sampled at `nodes`.
AffineFit affine_fit(const std::vector<Point>& nodes, const std::vector<double>& values);

/// Samples `field` at every node of `grid`, in node order.
std::vector<double> sample_grid(const ScalarField& field, const GridSpec& grid);

}  // namespace renormlab
