#include "renormlab/field_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/QR>

#include "renormlab/errors.hpp"
#include "renormlab/parallel.hpp"

namespace renormlab {

double eval(const HarmonicExpr& f, const Point& x) { return f.eval(x); }

Eigen::VectorXd gradient(const HarmonicExpr& f, const Point& x) { return f.eval_with_gradient(x).gradient; }

double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::numbers::ln2;
}

double tilde_from(double value, double gradient_norm) {
  if (gradient_norm == 0.0) return 0.0;
  return gradient_norm * std::exp(-log_cosh(value));
}

double tilde_derivative(const HarmonicExpr& f, const Point& x) {
  const auto vg = f.eval_with_gradient(x);
  return tilde_from(vg.value, vg.gradient.norm());
}

double harnack_constant(Eigen::Index dim) { return std::pow(3.0, -static_cast<double>(dim)); }

HarnackReport harnack_check(const HarmonicExpr& f, const Point& p, double R, const GridSpec& sample) {
  if (p.size() != f.dim() || sample.dim() != f.dim()) throw DimensionError("harnack_check: dimension mismatch");
  if (!(R > 0.0)) throw PreconditionError("harnack_check: radius must be positive");

  HarnackReport rep;
  rep.constant = harnack_constant(f.dim());
  rep.min_value = std::numeric_limits<double>::infinity();
  rep.max_value = -std::numeric_limits<double>::infinity();

  const std::size_t n = sample.size();
  for (std::size_t k = 0; k < n; ++k) {
    const Point x = sample.node(k);
    const double d = distance(x, p);
    if (d >= 2.0 * R) continue;
    const double v = f.eval(x);
    ++rep.outer_samples;
    if (!(v > 0.0)) {
      throw PreconditionError("harnack_check: f is not positive on B(p, 2R) (value " + format_number(v) + ")");
    }
    if (d > R) continue;
    ++rep.inner_samples;
    if (v < rep.min_value) {
      rep.min_value = v;
      rep.argmin = x;
    }
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = x;
    }
  }
  if (rep.inner_samples == 0) throw PreconditionError("harnack_check: no grid node inside B(p, R)");
  rep.worst_ratio = rep.min_value / rep.max_value;
  // Relative slack absorbs rounding when the bound is attained exactly.
  rep.pass = rep.worst_ratio >= rep.constant * (1.0 - 1e-12);
  return rep;
}

std::vector<double> sample_grid(const ScalarField& field, const GridSpec& grid) {
  std::vector<double> values(grid.size());
  parallel_for(values.size(), [&](std::size_t k) { values[k] = field(grid.node(k)); });
  return values;
}

AffineFit affine_fit(const std::vector<Point>& nodes, const std::vector<double>& values) {
  if (nodes.empty() || nodes.size() != values.size()) throw PreconditionError("affine_fit: empty or mismatched sample");
  const Eigen::Index m = nodes.front().size();
  const auto rows = static_cast<Eigen::Index>(nodes.size());
  bool all_equal = true;
  for (const auto& x : nodes) {
    if (x.size() != m) throw DimensionError("affine_fit: nodes differ in dimension");
    if (x != nodes.front()) all_equal = false;
  }
  if (all_equal) throw PreconditionError("affine_fit: degenerate grid (all nodes coincide)");

  // Center the design for conditioning; the constant is shifted back afterwards.
  Point mean = Point::Zero(m);
  for (const auto& x : nodes) mean += x;
  mean /= static_cast<double>(rows);
  Eigen::MatrixXd A(rows, m + 1);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    A(r, 0) = 1.0;
    A.row(r).tail(m) = (nodes[static_cast<std::size_t>(r)] - mean).transpose();
    y[r] = values[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd beta = A.completeOrthogonalDecomposition().solve(y);

  AffineFit out;
  out.fit.gradient = beta.tail(m);
  out.fit.constant = beta[0] - out.fit.gradient.dot(mean);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double e = std::abs(y[r] - out.fit(nodes[static_cast<std::size_t>(r)]));
    out.residual = std::max(out.residual, e);
  }
  return out;
}

AffineFit affine_fit(const ScalarField& field, const GridSpec& grid) {
  return affine_fit(grid.nodes(), sample_grid(field, grid));
}

}  // namespace renormlab
