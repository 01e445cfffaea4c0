#include "renormlab/normality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "renormlab/errors.hpp"
#include "renormlab/parallel.hpp"

namespace renormlab {

FamilySample::FamilySample(std::vector<HarmonicExpr> m, Box d) : members(std::move(m)), domain(std::move(d)) {
  if (domain.dim() < 1) throw PreconditionError("family domain is empty");
  for (const auto& f : members) {
    if (f.dim() != domain.dim()) throw DimensionError("family member dimension differs from the domain");
  }
}

std::string to_string(NormalityVerdict v) {
  return v == NormalityVerdict::BoundedDerivative ? "BoundedDerivative" : "UnboundedDerivative";
}

std::string to_string(BrodyClass c) { return c == BrodyClass::ConsistentWithBrody ? "ConsistentWithBrody" : "Refuted"; }

namespace {

void check_compact(const FamilySample& fam, const Box& K) {
  if (K.dim() != fam.dim()) throw DimensionError("compact has the wrong dimension");
  if (!fam.domain.contains(K)) throw PreconditionError("compact is not inside the family domain");
}

// values[i] = (f, |grad f|) at node i.
std::vector<std::pair<double, double>> sample_member(const HarmonicExpr& f, const std::vector<Point>& nodes) {
  std::vector<std::pair<double, double>> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t i) {
    const ValueGradient vg = f.eval_with_gradient(nodes[i]);
    out[i] = {vg.value, vg.gradient.norm()};
  });
  return out;
}

}  // namespace

NormalityReport marty_bound(const FamilySample& fam, const Box& K, int points_per_axis, double m_big) {
  check_compact(fam, K);
  const auto nodes = GridSpec(K, points_per_axis).nodes();
  NormalityReport rep;
  rep.argmax.point = K.center();
  for (std::size_t j = 0; j < fam.members.size(); ++j) {
    const auto s = sample_member(fam.members[j], nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double t = tilde_from(s[i].first, s[i].second);
      if (t > rep.sup) {
        rep.sup = t;
        rep.argmax = {j, nodes[i], t};
      }
    }
  }
  if (rep.sup > m_big) {
    rep.verdict = NormalityVerdict::UnboundedDerivative;
    rep.witness = rep.argmax;
  }
  return rep;
}

CriterionReport criterion_levelset(const FamilySample& fam, double a, const Box& K, double M_K, int points_per_axis,
                                   double delta) {
  check_compact(fam, K);
  const auto nodes = GridSpec(K, points_per_axis).nodes();
  CriterionReport rep;
  for (std::size_t j = 0; j < fam.members.size(); ++j) {
    const auto s = sample_member(fam.members[j], nodes);
    double band = delta;
    if (!(band > 0.0)) {
      auto [lo, hi] = std::minmax_element(s.begin(), s.end());
      band = 1e-3 * (hi->first - lo->first);
    }
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (std::abs(s[i].first - a) > band) continue;
      ++rep.tested;
      if (s[i].second > M_K) rep.violations.push_back({j, nodes[i], s[i].second});
    }
  }
  rep.vacuous = rep.tested == 0;
  rep.pass = rep.violations.empty();
  return rep;
}

TabulatedBound::TabulatedBound(std::vector<double> xs, std::vector<double> ys) : xs_(std::move(xs)), ys_(std::move(ys)) {
  if (xs_.empty() || xs_.size() != ys_.size()) throw PreconditionError("bound table needs matching nonempty columns");
  for (std::size_t i = 0; i < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i])) throw PreconditionError("bound table abscissae must be finite");
    if (i > 0 && !(xs_[i] > xs_[i - 1])) throw PreconditionError("bound table abscissae must increase");
    if (std::isnan(ys_[i]) || ys_[i] < 0.0) throw PreconditionError("bound table values must lie in [0, inf]");
  }
  if (std::none_of(ys_.begin(), ys_.end(), [](double y) { return std::isfinite(y); })) {
    throw PreconditionError("bound table needs at least one finite value");
  }
}

TabulatedBound TabulatedBound::constant(double c) { return TabulatedBound({0.0}, {c}); }

double TabulatedBound::operator()(double t) const {
  if (t <= xs_.front()) return ys_.front();
  if (t >= xs_.back()) return ys_.back();
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin());
  const double y0 = ys_[i - 1], y1 = ys_[i];
  if (std::isinf(y0) || std::isinf(y1)) return std::numeric_limits<double>::infinity();
  const double w = (t - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
  return y0 + w * (y1 - y0);
}

CriterionReport criterion_gradient_dominated(const FamilySample& fam, const TabulatedBound& l, const Box& K,
                                             int points_per_axis) {
  check_compact(fam, K);
  const auto nodes = GridSpec(K, points_per_axis).nodes();
  CriterionReport rep;
  for (std::size_t j = 0; j < fam.members.size(); ++j) {
    const auto s = sample_member(fam.members[j], nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      ++rep.tested;
      if (s[i].second > l(s[i].first)) rep.violations.push_back({j, nodes[i], s[i].second});
    }
  }
  rep.vacuous = rep.tested == 0;
  rep.pass = rep.violations.empty();
  return rep;
}

BrodyReport brody_verdict(const HarmonicExpr& f, double M, const std::vector<double>& half_sides, int points_per_axis) {
  if (half_sides.empty()) throw PreconditionError("at least one probe box is required");
  for (std::size_t i = 1; i < half_sides.size(); ++i) {
    if (!(half_sides[i] > half_sides[i - 1])) throw PreconditionError("probe boxes must be nested and increasing");
  }
  if (!(2.0 * half_sides.back() >= 100.0)) throw PreconditionError("largest probe box must have side at least 100");

  BrodyReport rep;
  const Eigen::Index m = f.dim();
  for (double h : half_sides) {
    const GridSpec grid(Box::cube(m, -h, h), points_per_axis);
    const auto nodes = grid.nodes();
    const auto s = sample_member(f, nodes);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double t = tilde_from(s[i].first, s[i].second);
      if (t > rep.sup) rep.sup = t;
      if (t > M && !rep.witness) rep.witness = Witness{0, nodes[i], t};
    }
    if (rep.witness) {
      rep.verdict = BrodyClass::Refuted;
      return rep;
    }
  }
  const GridSpec largest(Box::cube(m, -half_sides.back(), half_sides.back()), points_per_axis);
  rep.fit = affine_fit([&](const Point& x) { return f.eval(x); }, largest);
  return rep;
}

}  // namespace renormlab
