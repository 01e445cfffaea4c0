#include "renormlab/quadrature.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "renormlab/errors.hpp"
#include "renormlab/field_ops.hpp"

namespace renormlab {

QuadratureRule gauss_gegenbauer(int n, double alpha) {
  if (n < 1) throw PreconditionError("quadrature needs at least one node");
  if (!(alpha > -1.0)) throw PreconditionError("Gegenbauer weight exponent must exceed -1");
  // Symmetric Jacobi matrix: zero diagonal, off-diagonal
  // b_k^2 = k (k + 2 alpha) / ((2k + 2 alpha + 1)(2k + 2 alpha - 1)).
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double kk = k;
    const double b2 = kk * (kk + 2.0 * alpha) / ((2.0 * kk + 2.0 * alpha + 1.0) * (2.0 * kk + 2.0 * alpha - 1.0));
    J(k, k - 1) = J(k - 1, k) = std::sqrt(b2);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = es.eigenvalues()[i];
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = v0 * v0;
    total += v0 * v0;
  }
  for (auto& w : rule.weights) w /= total;
  return rule;
}

namespace {

// Mean over the unit sphere S^{dim-1}, embedded in coordinates [offset, offset + dim)
// of `x`, scaled by `radius`. Coordinates before `offset` are already fixed.
double sphere_mean_rec(const ScalarField& field, Point& x, Eigen::Index offset, Eigen::Index dim,
                       double radius, int order) {
  if (dim == 1) {
    x[offset] = radius;
    const double a = field(x);
    x[offset] = -radius;
    const double b = field(x);
    return 0.5 * (a + b);
  }
  if (dim == 2) {
    const int n = 2 * order;
    double sum = 0.0;
    for (int k = 0; k < n; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / n;
      x[offset] = radius * std::cos(t);
      x[offset + 1] = radius * std::sin(t);
      sum += field(x);
    }
    return sum / n;
  }
  // x_offset = radius * t with t = cos(theta); the remaining coordinates lie on a
  // sphere of radius radius * sqrt(1 - t^2). Density of t is (1 - t^2)^((dim-3)/2).
  const auto rule = gauss_gegenbauer(order, 0.5 * static_cast<double>(dim - 3));
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double t = rule.nodes[i];
    x[offset] = radius * t;
    sum += rule.weights[i] * sphere_mean_rec(field, x, offset + 1, dim - 1, radius * std::sqrt(1.0 - t * t), order);
  }
  return sum;
}

}  // namespace

double spherical_mean(const ScalarField& field, Eigen::Index dim, double r, int order) {
  if (dim < 1) throw DimensionError("spherical mean needs dimension >= 1");
  if (!(r > 0.0) || !std::isfinite(r)) throw PreconditionError("sphere radius must be positive");
  if (order < 1) throw PreconditionError("quadrature order must be positive");
  Point x = Point::Zero(dim);
  return sphere_mean_rec(field, x, 0, dim, r, order);
}

}  // namespace renormlab
