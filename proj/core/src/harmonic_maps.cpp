#include "renormlab/harmonic_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "renormlab/errors.hpp"
#include "renormlab/field_ops.hpp"
#include "renormlab/parallel.hpp"

namespace renormlab {

HarmonicMap::HarmonicMap(std::vector<HarmonicExpr> components) : components_(std::move(components)) {
  if (components_.empty()) throw PreconditionError("a map needs at least one component");
  for (const auto& c : components_) {
    if (c.dim() != components_.front().dim()) throw DimensionError("map components differ in source dimension");
  }
}

HarmonicMap HarmonicMap::holomorphic_pair(const HoloExpr& f, const HoloExpr& g) {
  HarmonicMap H({HarmonicExpr::real_part(f), HarmonicExpr::real_part(g)});
  H.parents_ = std::make_pair(f, g);
  return H;
}

Eigen::VectorXd HarmonicMap::eval(const Point& x) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(components_.size()));
  for (std::size_t i = 0; i < components_.size(); ++i) v[static_cast<Eigen::Index>(i)] = components_[i].eval(x);
  return v;
}

Eigen::MatrixXd HarmonicMap::differential(const Point& x) const {
  Eigen::MatrixXd D(static_cast<Eigen::Index>(components_.size()), source_dim());
  for (std::size_t i = 0; i < components_.size(); ++i) {
    D.row(static_cast<Eigen::Index>(i)) = components_[i].eval_with_gradient(x).gradient.transpose();
  }
  return D;
}

double HarmonicMap::tilde(const Point& x) const {
  double s = 0.0;
  for (const auto& c : components_) s += tilde_derivative(c, x);
  return s;
}

HarmonicMap HarmonicMap::precompose(const AffineChart& chart) const {
  std::vector<HarmonicExpr> cs;
  for (const auto& c : components_) cs.push_back(c.precompose(chart));
  HarmonicMap out(std::move(cs));
  if (parents_) {
    const Complex a(chart.scale, 0.0);
    const Complex b(chart.center[0], chart.center[1]);
    out.parents_ = std::make_pair(HoloExpr::affine_argument(a, b, parents_->first),
                                  HoloExpr::affine_argument(a, b, parents_->second));
  }
  return out;
}

double jacobian(const HarmonicMap& H, const Point& z) {
  if (!H.parents()) throw PreconditionError("jacobian needs a holomorphic pair");
  if (z.size() != 2) throw DimensionError("holomorphic pairs live on R^2");
  const Complex w(z[0], z[1]);
  const Complex fp = H.parents()->first.jet(w).derivative;
  const Complex gp = H.parents()->second.jet(w).derivative;
  return std::imag(fp * std::conj(gp));
}

RankProbe rank_degenerate_probe(const HarmonicMap& H, const GridSpec& grid, double minor_tol) {
  if (grid.dim() != H.source_dim()) throw DimensionError("grid dimension differs from the map source");
  const auto nodes = grid.nodes();
  std::vector<double> minors(nodes.size());
  std::vector<Eigen::VectorXd> images(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Eigen::MatrixXd D = H.differential(nodes[i]);
    double best = 0.0;
    for (Eigen::Index r1 = 0; r1 < D.rows(); ++r1)
      for (Eigen::Index r2 = r1 + 1; r2 < D.rows(); ++r2)
        for (Eigen::Index c1 = 0; c1 < D.cols(); ++c1)
          for (Eigen::Index c2 = c1 + 1; c2 < D.cols(); ++c2)
            best = std::max(best, std::abs(D(r1, c1) * D(r2, c2) - D(r1, c2) * D(r2, c1)));
    minors[i] = best;
    images[i] = H.eval(nodes[i]);
  });
  RankProbe out;
  const auto it = std::max_element(minors.begin(), minors.end());
  out.max_minor = *it;
  out.witness = nodes[static_cast<std::size_t>(it - minors.begin())];
  if (out.max_minor > minor_tol) return out;

  out.degenerate = true;
  const Eigen::Index m = images.front().size();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
  for (const auto& y : images) mean += y;
  mean /= static_cast<double>(images.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(m, m);
  double spread = 0.0;
  for (const auto& y : images) {
    cov += (y - mean) * (y - mean).transpose();
    spread = std::max(spread, (y - mean).norm());
  }
  out.line_point = mean;
  if (spread <= 1e-12 * std::max(1.0, mean.norm())) {
    out.single_point = true;
    out.line_dir = Eigen::VectorXd::Zero(m);
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  out.line_dir = es.eigenvectors().col(m - 1);
  for (const auto& y : images) {
    const Eigen::VectorXd r = y - mean;
    out.line_residual = std::max(out.line_residual, (r - r.dot(out.line_dir) * out.line_dir).norm());
  }
  return out;
}

HolomorphyWitness holomorphy_witness(const HarmonicMap& H, const GridSpec& grid, double jac_tol) {
  if (!H.parents()) throw PreconditionError("holomorphy witness needs a holomorphic pair");
  if (grid.dim() != 2) throw DimensionError("holomorphic pairs live on R^2");
  const auto& [f, g] = *H.parents();
  const auto nodes = grid.nodes();
  std::vector<HoloJet> fj(nodes.size()), gj(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const Complex w(nodes[i][0], nodes[i][1]);
    fj[i] = f.jet(w);
    gj[i] = g.jet(w);
  });

  HolomorphyWitness out;
  std::size_t best_g = 0;
  out.min_jacobian = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double J = std::imag(fj[i].derivative * std::conj(gj[i].derivative));
    if (J < out.min_jacobian) {
      out.min_jacobian = J;
      out.jacobian_witness = nodes[i];
    }
    if (std::abs(gj[i].derivative) > std::abs(gj[best_g].derivative)) best_g = i;
  }
  if (std::abs(gj[best_g].derivative) == 0.0) throw PreconditionError("g' vanishes on the whole grid");
  if (out.min_jacobian < -jac_tol) {
    out.nonnegative_jacobian = false;
    return out;
  }
  out.c = fj[best_g].derivative / gj[best_g].derivative;
  out.shift = fj[best_g].value - out.c * gj[best_g].value;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    out.residual = std::max(out.residual, std::abs(fj[i].derivative - out.c * gj[i].derivative));
  }
  out.recombination << out.c.real(), -out.c.imag(), 1.0, 0.0;
  out.invertible = out.c.imag() != 0.0;
  return out;
}

std::string to_string(ComponentClass c) {
  switch (c) {
    case ComponentClass::AffineNonconstant: return "AffineNonconstant";
    case ComponentClass::AffineConstant: return "AffineConstant";
    case ComponentClass::PlusInfinity: return "PlusInfinity";
    case ComponentClass::MinusInfinity: return "MinusInfinity";
    default: return "Undecided";
  }
}

MapRenormReport map_renormalize(const MapSequence& Hseq, const Point& p, const std::vector<int>& indices,
                                const MapRenormOptions& opts) {
  WeightSequence phis = [&](int k) -> ScalarField {
    HarmonicMap H = Hseq(k);
    return [H](const Point& x) { return H.tilde(x); };
  };
  auto route = [&](int k, const AffineChart& c) { return Hseq(k).precompose(c).tilde(Point::Zero(c.dim())); };
  MapRenormReport rep;
  rep.trace = make_rescaling(phis, p, [p](int) { return p; }, indices, opts.rescaling, route);

  const GridSpec probe = opts.rescaling.probe ? *opts.rescaling.probe : default_probe(p.size());
  const auto nodes = probe.nodes();
  const std::size_t w = std::clamp<std::size_t>(opts.window, 1, rep.trace.steps.size());
  std::vector<HarmonicMap> rescaled;
  std::vector<int> idx;
  for (std::size_t s = rep.trace.steps.size() - w; s < rep.trace.steps.size(); ++s) {
    const auto& st = rep.trace.steps[s];
    rescaled.push_back(Hseq(st.n).precompose(st.chart));
    idx.push_back(st.n);
  }
  const std::size_t m = rescaled.front().target_dim();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<std::vector<double>> values;
    for (const auto& F : rescaled) {
      std::vector<double> v(nodes.size());
      parallel_for(nodes.size(), [&](std::size_t j) { v[j] = F.components()[i].eval(nodes[j]); });
      values.push_back(std::move(v));
    }
    ConvergenceReport r = classify_sequence(nodes, values, idx, opts.limit);
    ComponentClass c = ComponentClass::Undecided;
    switch (r.cls) {
      case LimitClass::AffineNonconstant: c = ComponentClass::AffineNonconstant; break;
      case LimitClass::ConstantFinite: c = ComponentClass::AffineConstant; break;
      case LimitClass::PlusInfinity: c = ComponentClass::PlusInfinity; break;
      case LimitClass::MinusInfinity: c = ComponentClass::MinusInfinity; break;
      case LimitClass::Undecided: break;
    }
    rep.components.push_back(c);
    rep.reports.push_back(std::move(r));
  }
  rep.guarantee = std::find(rep.components.begin(), rep.components.end(), ComponentClass::AffineNonconstant) !=
                  rep.components.end();
  return rep;
}

ImageProbe image_probe(const HarmonicMap& H, const std::vector<Point>& samples, const DomainExpr& d,
                       ImageFunctional functional, std::size_t max_violations) {
  if (H.target_dim() != 2) throw DimensionError("image probing needs a map into R^2");
  std::vector<Eigen::Vector2d> img(samples.size());
  std::vector<char> in(samples.size());
  parallel_for(samples.size(), [&](std::size_t i) {
    const Eigen::VectorXd y = H.eval(samples[i]);
    img[i] = Eigen::Vector2d(y[0], y[1]);
    in[i] = d.contains(img[i]) ? 1 : 0;
  });
  ImageProbe out;
  out.total = samples.size();
  out.functional_min = std::numeric_limits<double>::infinity();
  out.functional_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (in[i]) ++out.inside;
    else if (out.violations.size() < max_violations) out.violations.emplace_back(samples[i], img[i]);
    if (functional == ImageFunctional::Product) {
      const double v = img[i].x() * img[i].y();
      if (v < out.functional_min) { out.functional_min = v; out.argmin = samples[i]; }
      if (v > out.functional_max) { out.functional_max = v; out.argmax = samples[i]; }
    }
  }
  if (functional == ImageFunctional::None || samples.empty()) out.functional_min = out.functional_max = 0.0;
  return out;
}

}  // namespace renormlab
