#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the library code under test beyond plain evaluation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace oracle {

using Field = std::function<double(const Eigen::VectorXd&)>;

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

inline Eigen::VectorXd fd_gradient(const Field& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

inline double fd_laplacian(const Field& f, const Eigen::VectorXd& x, double h) {
  double s = 0.0;
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    s += (f(a) - 2 * f0 + f(b)) / (h * h);
  }
  return s;
}

/// Direct |grad f| / cosh f, valid while cosh does not overflow.
inline double tilde_direct(double value, double grad_norm) { return grad_norm / std::cosh(value); }

/// Conditions (1)-(3) of the selection lemma checked by full enumeration.
struct SelectionCheck {
  bool c1 = false, c2 = false, c3 = false;
  bool ok() const { return c1 && c2 && c3; }
};

inline SelectionCheck check_selection(const std::vector<Eigen::VectorXd>& pts, const std::vector<double>& phi,
                                      std::size_t p, std::size_t q, double tau, double eps,
                                      const std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)>& d) {
  SelectionCheck c;
  const double slack = 1e-12;
  c.c1 = d(pts[p], pts[q]) <= tau / (eps * phi[p] * (tau - 1)) * (1 + slack);
  c.c2 = phi[q] >= phi[p];
  c.c3 = true;
  const double r = 1.0 / (eps * phi[q]);
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (d(pts[i], pts[q]) <= r && phi[i] > tau * phi[q] * (1 + slack)) c.c3 = false;
  return c;
}

/// 2x2 determinant of the central-difference Jacobian of (u, v).
inline double fd_jacobian(const Field& u, const Field& v, const Eigen::VectorXd& z, double h = 1e-6) {
  const Eigen::VectorXd gu = fd_gradient(u, z, h), gv = fd_gradient(v, z, h);
  return gu[0] * gv[1] - gu[1] * gv[0];
}

/// Exact least-squares affine fit by normal equations, independent of the library.
struct Fit {
  double c;
  Eigen::VectorXd v;
  double residual;
};

inline Fit affine_fit(const std::vector<Eigen::VectorXd>& xs, const std::vector<double>& ys) {
  const Eigen::Index m = xs.front().size();
  Eigen::MatrixXd A(static_cast<Eigen::Index>(xs.size()), m + 1);
  Eigen::VectorXd b(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    A(static_cast<Eigen::Index>(i), 0) = 1.0;
    A.row(static_cast<Eigen::Index>(i)).tail(m) = xs[i].transpose();
    b[static_cast<Eigen::Index>(i)] = ys[i];
  }
  const Eigen::VectorXd s = (A.transpose() * A).ldlt().solve(A.transpose() * b);
  Fit f{s[0], s.tail(m), 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) f.residual = std::max(f.residual, std::abs(f.c + f.v.dot(xs[i]) - ys[i]));
  return f;
}

/// Truncated Taylor series of exp(M); fine for |M| of order 1.
inline Eigen::MatrixXcd exp_series(const Eigen::MatrixXcd& M, int terms = 60) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(M.rows(), M.cols());
  Eigen::MatrixXcd term = out;
  for (int k = 1; k < terms; ++k) {
    term = term * M / static_cast<double>(k);
    out += term;
  }
  return out;
}

}  // namespace oracle
