#include "renormlab/group_targets.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "renormlab/errors.hpp"
#include "renormlab/parallel.hpp"

namespace renormlab {

double quotient_distance(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size()) throw DimensionError("quotient distance between vectors of different size");
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    const double r = d - std::round(d);
    s += r * r;
  }
  return std::sqrt(s);
}

double differential_norm(const HarmonicMap& H, const Point& x) { return H.differential(x).norm(); }

namespace {

std::vector<int> window_indices(const RenormTrace& t, std::size_t window) {
  const std::size_t w = std::clamp<std::size_t>(window, 1, t.steps.size());
  std::vector<int> out;
  for (std::size_t s = t.steps.size() - w; s < t.steps.size(); ++s) out.push_back(static_cast<int>(s));
  return out;
}

struct AffineFitOnProbe {
  Eigen::MatrixXd linear;
  Eigen::VectorXd constant;
  double residual = 0.0;
  double spread = 0.0;
};

// G is sampled on the probe; the candidate limit is G(0) + mean(DG) x.
AffineFitOnProbe fit_on_probe(const HarmonicMap& G, const std::vector<Point>& nodes, bool quotient) {
  const Eigen::Index m = G.source_dim();
  const auto n = static_cast<Eigen::Index>(G.target_dim());
  std::vector<Eigen::MatrixXd> D(nodes.size());
  std::vector<Eigen::VectorXd> V(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) {
    D[j] = G.differential(nodes[j]);
    V[j] = G.eval(nodes[j]);
  });
  AffineFitOnProbe f;
  f.linear = Eigen::MatrixXd::Zero(n, m);
  for (const auto& d : D) f.linear += d;
  f.linear /= static_cast<double>(nodes.size());
  f.constant = G.eval(Point::Zero(m));
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Eigen::VectorXd model = f.constant + f.linear * nodes[j];
    const double r = quotient ? quotient_distance(V[j], model) : (V[j] - model).norm();
    f.residual = std::max(f.residual, r);
    f.spread = std::max(f.spread, (D[j] - f.linear).norm());
  }
  if (quotient) f.constant = f.constant.array() - f.constant.array().floor();
  return f;
}

AffineLimitReport affine_limit(const RenormTrace& trace, const std::function<HarmonicMap(int)>& rescaled,
                               const GroupRenormOptions& opts, bool quotient) {
  const GridSpec probe = opts.rescaling.probe ? *opts.rescaling.probe : default_probe(trace.base.size());
  const auto nodes = probe.nodes();
  AffineLimitReport rep;
  AffineFitOnProbe last;
  for (int s : window_indices(trace, opts.window)) {
    last = fit_on_probe(rescaled(s), nodes, quotient);
    rep.residuals.push_back(last.residual);
  }
  rep.linear = last.linear;
  rep.constant = last.constant;
  rep.residual = last.residual;
  rep.derivative_spread = last.spread;
  if (std::isfinite(rep.residual) && rep.residual <= opts.limit.res_max)
    rep.cls = rep.linear.norm() >= opts.limit.grad_min ? ComponentClass::AffineNonconstant
                                                       : ComponentClass::AffineConstant;
  return rep;
}

ComponentClass component_class(LimitClass c) {
  switch (c) {
    case LimitClass::AffineNonconstant: return ComponentClass::AffineNonconstant;
    case LimitClass::ConstantFinite: return ComponentClass::AffineConstant;
    case LimitClass::PlusInfinity: return ComponentClass::PlusInfinity;
    case LimitClass::MinusInfinity: return ComponentClass::MinusInfinity;
    case LimitClass::Undecided: break;
  }
  return ComponentClass::Undecided;
}

HarmonicMap shifted(const HarmonicMap& G, const Eigen::VectorXd& c) {
  std::vector<HarmonicExpr> comps;
  for (std::size_t i = 0; i < G.target_dim(); ++i)
    comps.push_back(G.components()[i] + HarmonicExpr::constant(G.source_dim(), c[static_cast<Eigen::Index>(i)]));
  return HarmonicMap(std::move(comps));
}

}  // namespace

TorusRenormResult torus_renormalize(const TorusSequence& seq, const Point& p, const std::vector<int>& indices,
                                    const GroupRenormOptions& opts) {
  WeightSequence phis = [&](int k) -> ScalarField {
    HarmonicMap H = seq(k).lift;
    return [H](const Point& x) { return differential_norm(H, x); };
  };
  auto route = [&](int k, const AffineChart& c) {
    return differential_norm(seq(k).lift.precompose(c), Point::Zero(c.dim()));
  };
  TorusRenormResult out;
  out.trace = make_rescaling(phis, p, [p](int) { return p; }, indices, opts.rescaling, route);
  auto rescaled = [&](int s) {
    const auto& st = out.trace.steps[static_cast<std::size_t>(s)];
    return seq(st.n).lift.precompose(st.chart);
  };
  out.limit = affine_limit(out.trace, rescaled, opts, true);
  return out;
}

ConstantAdjustedResult constant_adjusted_renormalize(const MapSequence& seq, const Point& p,
                                                     const std::vector<int>& indices,
                                                     const GroupRenormOptions& opts) {
  WeightSequence phis = [&](int k) -> ScalarField {
    HarmonicMap H = seq(k);
    return [H](const Point& x) { return differential_norm(H, x); };
  };
  auto route = [&](int k, const AffineChart& c) {
    return differential_norm(seq(k).precompose(c), Point::Zero(c.dim()));
  };
  ConstantAdjustedResult out;
  out.trace = make_rescaling(phis, p, [p](int) { return p; }, indices, opts.rescaling, route);
  for (const auto& st : out.trace.steps) out.shifts.push_back(-seq(st.n).eval(st.chart.center));

  auto rescaled = [&](int s) {
    const auto& st = out.trace.steps[static_cast<std::size_t>(s)];
    return shifted(seq(st.n).precompose(st.chart), out.shifts[static_cast<std::size_t>(s)]);
  };

  const GridSpec probe = opts.rescaling.probe ? *opts.rescaling.probe : default_probe(p.size());
  const auto nodes = probe.nodes();
  const auto win = window_indices(out.trace, opts.window);
  std::vector<HarmonicMap> maps;
  std::vector<int> idx;
  for (int s : win) {
    maps.push_back(rescaled(s));
    idx.push_back(out.trace.steps[static_cast<std::size_t>(s)].n);
  }
  for (std::size_t i = 0; i < maps.front().target_dim(); ++i) {
    std::vector<std::vector<double>> values;
    for (const auto& G : maps) {
      std::vector<double> v(nodes.size());
      parallel_for(nodes.size(), [&](std::size_t j) { v[j] = G.components()[i].eval(nodes[j]); });
      values.push_back(std::move(v));
    }
    out.components.push_back(component_class(classify_sequence(nodes, values, idx, opts.limit).cls));
  }
  out.limit = affine_limit(out.trace, rescaled, opts, false);
  return out;
}

MatrixHoloMap::MatrixHoloMap(Eigen::Index n, std::vector<HoloExpr> row_major)
    : n_(n), entries_(std::move(row_major)) {
  if (n < 1) throw DimensionError("matrix map needs n >= 1");
  if (static_cast<Eigen::Index>(entries_.size()) != n * n)
    throw DimensionError("matrix map needs n^2 entries, got " + std::to_string(entries_.size()));
}

namespace {

void jets(const MatrixHoloMap& F, Complex z, CMatrix& value, CMatrix& deriv) {
  const Eigen::Index n = F.n();
  value.resize(n, n);
  deriv.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      const HoloJet J = F.entries()[static_cast<std::size_t>(i * n + j)].jet(z);
      value(i, j) = J.value;
      deriv(i, j) = J.derivative;
    }
}

}  // namespace

CMatrix MatrixHoloMap::value(Complex z) const {
  CMatrix v(n_, n_);
  for (Eigen::Index i = 0; i < n_; ++i)
    for (Eigen::Index j = 0; j < n_; ++j) v(i, j) = entries_[static_cast<std::size_t>(i * n_ + j)].value(z);
  return v;
}

CMatrix MatrixHoloMap::derivative(Complex z) const {
  CMatrix v, d;
  jets(*this, z, v, d);
  return d;
}

MatrixHoloMap MatrixHoloMap::precompose(Complex a, Complex b) const {
  std::vector<HoloExpr> e;
  e.reserve(entries_.size());
  for (const auto& h : entries_) e.push_back(HoloExpr::affine_argument(a, b, h));
  return MatrixHoloMap(n_, std::move(e));
}

std::string MatrixHoloMap::to_string() const {
  std::ostringstream os;
  os << "(matrix " << n_;
  for (const auto& h : entries_) os << ' ' << h.to_string();
  os << ')';
  return os.str();
}

MatrixHoloMap MatrixHoloMap::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

MatrixHoloMap MatrixHoloMap::from_sexpr(const SExpr& e) {
  if (!e.is_list || e.head() != "matrix") parse_fail(e, "expected (matrix N entries...)");
  if (e.arity() < 1) parse_fail(e, "matrix needs a size");
  const long n = to_integer(e.arg(0));
  if (n < 1) parse_fail(e.arg(0), "matrix size must be positive");
  if (e.arity() != static_cast<std::size_t>(1 + n * n))
    parse_fail(e, "matrix of size " + std::to_string(n) + " needs " + std::to_string(n * n) + " entries");
  std::vector<HoloExpr> entries;
  for (std::size_t i = 1; i < e.arity(); ++i) entries.push_back(HoloExpr::from_sexpr(e.arg(i)));
  return MatrixHoloMap(n, std::move(entries));
}

CMatrix matrix_Df(const MatrixHoloMap& F, Complex z) {
  CMatrix v, d;
  jets(F, z, v, d);
  Eigen::PartialPivLU<CMatrix> lu(v);
  // Compared in logs: entries of exponential families overflow |F|^n long before F itself.
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < F.n(); ++i) log_det += std::log(std::abs(lu.matrixLU()(i, i)));
  const double log_scale = static_cast<double>(F.n()) * std::log(v.stableNorm());
  const double det = std::exp(log_det);
  if (!(log_det > std::log(1e-12) + log_scale)) {
    std::ostringstream os;
    os << "F(z) is singular at z = " << z << " (|det| = " << det << ")";
    throw SingularMatrixError(os.str(), det);
  }
  CMatrix out = lu.solve(d);
  if (!out.allFinite()) throw NumericError("non-finite logarithmic derivative");
  return out;
}

CMatrix expm(const CMatrix& X, Complex z) {
  const CMatrix M = z * X;
  CMatrix out = M.exp();
  if (!out.allFinite()) throw NumericError("matrix exponential overflowed");
  return out;
}

MatrixHoloMap exp_family(const CMatrix& g, const CMatrix& X, Complex s) {
  if (X.rows() != X.cols() || g.rows() != X.rows() || g.cols() != X.cols())
    throw DimensionError("exp family needs square matrices of equal size");
  Eigen::ComplexEigenSolver<CMatrix> es(X);
  if (es.info() != Eigen::Success) throw NumericError("eigendecomposition failed");
  const CMatrix V = es.eigenvectors();
  Eigen::FullPivLU<CMatrix> lu(V);
  if (!lu.isInvertible()) throw PreconditionError("exp family needs a diagonalizable generator");
  const CMatrix Vinv = lu.inverse();
  const double cond = V.norm() * Vinv.norm();
  if (!(cond < 1e10)) throw PreconditionError("generator is too close to non-diagonalizable");
  const CMatrix gV = g * V;
  const Eigen::Index n = X.rows();
  std::vector<HoloExpr> entries;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      HoloExpr e = HoloExpr::constant(0.0);
      for (Eigen::Index l = 0; l < n; ++l) {
        const Complex c = gV(i, l) * Vinv(l, j);
        if (c == Complex(0.0)) continue;
        e = e + c * HoloExpr::exp(HoloExpr::polynomial({0.0, s * es.eigenvalues()[l]}));
      }
      entries.push_back(e);
    }
  return MatrixHoloMap(n, std::move(entries));
}

LieRenormReport lie_renormalize(const MatrixSequence& seq, Complex p, const std::vector<int>& indices,
                                const LieOptions& opts) {
  auto df_norm = [](const MatrixHoloMap& F, const Point& x, int k) {
    try {
      return matrix_Df(F, {x[0], x[1]}).norm();
    } catch (const SingularMatrixError& e) {
      throw SingularMatrixError(std::string(e.what()) + " at step " + std::to_string(k),
                                e.determinant_magnitude());
    }
  };
  WeightSequence phis = [&](int k) -> ScalarField {
    MatrixHoloMap F = seq(k);
    return [F, k, df_norm](const Point& x) { return df_norm(F, x, k); };
  };
  auto route = [&](int k, const AffineChart& c) {
    const MatrixHoloMap U = seq(k).precompose(c.scale, {c.center[0], c.center[1]});
    return df_norm(U, Point::Zero(2), k);
  };
  const Point base = point({p.real(), p.imag()});
  LieRenormReport rep;
  rep.trace = make_rescaling(phis, base, [base](int) { return base; }, indices, opts.rescaling, route);

  const auto& st = rep.trace.steps.back();
  const Complex b{st.chart.center[0], st.chart.center[1]};
  const MatrixHoloMap F = seq(st.n);
  const MatrixHoloMap G = F.precompose(st.chart.scale, b);
  rep.anchor = F.value(b);
  Eigen::PartialPivLU<CMatrix> lu(rep.anchor);
  const Eigen::Index n = F.n();
  rep.g = CMatrix::Identity(n, n);

  const GridSpec probe(Box::cube(2, -1.0, 1.0), std::max(opts.probe_points, 2));
  const auto nodes = probe.nodes();
  std::vector<CMatrix> U(nodes.size()), D(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t j) {
    const Complex z{nodes[j][0], nodes[j][1]};
    U[j] = lu.solve(G.value(z));
    D[j] = matrix_Df(G, z);
  });
  rep.X = CMatrix::Zero(n, n);
  for (const auto& d : D) rep.X += d;
  rep.X /= static_cast<double>(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const Complex z{nodes[j][0], nodes[j][1]};
    rep.df_constancy = std::max(rep.df_constancy, (D[j] - rep.X).norm());
    rep.residual = std::max(rep.residual, (U[j] - expm(rep.X, z)).norm());
  }
  rep.nonconstant = rep.X.norm() >= 1e-3;
  return rep;
}

}  // namespace renormlab
