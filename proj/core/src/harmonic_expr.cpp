#include "renormlab/harmonic_expr.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <utility>

#include "renormlab/errors.hpp"

namespace renormlab {

struct HarmonicExpr::Node {
  enum class Kind { Coordinate, Constant, Sum, Scale, Polynomial, RePart, ImPart, Chart, Poisson, ExpWave };
  Kind kind = Kind::Constant;
  Eigen::Index dim = 0;
  Eigen::Index axis = 0;
  double c = 0.0;  // constant value, scale factor, or phase
  std::vector<Monomial> terms;
  std::optional<HoloExpr> holo;
  std::optional<AffineChart> chart;
  Eigen::VectorXd a;  // Poisson pole, or wave growth vector
  Eigen::VectorXd b;  // wave oscillation vector
  std::vector<HarmonicExpr> args;
};

namespace {

using Kind = HarmonicExpr::Node::Kind;

double ipow(double x, int k) {
  double r = 1.0;
  double base = x;
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += " ";
    s += format_number(v[i]);
  }
  return s + ")";
}

Eigen::VectorXd to_vector(const SExpr& e) {
  const auto v = to_numbers(e);
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
  return out;
}

Eigen::Index to_dim(const SExpr& e) {
  const long m = to_integer(e);
  if (m < 1) parse_fail(e, "dimension must be >= 1");
  return static_cast<Eigen::Index>(m);
}

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw PreconditionError(std::string(what) + " must be finite");
}

ValueGradient eval_node(const HarmonicExpr::Node& n, const Point& x);

}  // namespace

HarmonicExpr HarmonicExpr::coordinate(Eigen::Index dim, Eigen::Index axis) {
  if (dim < 1 || axis < 0 || axis >= dim) throw DimensionError("coordinate axis out of range");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Coordinate;
  n->dim = dim;
  n->axis = axis;
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::constant(Eigen::Index dim, double c) {
  if (dim < 1) throw DimensionError("dimension must be >= 1");
  require_finite(c, "constant");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->dim = dim;
  n->c = c;
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::affine(double c, const Eigen::VectorXd& gradient) {
  const Eigen::Index m = gradient.size();
  HarmonicExpr out = constant(m, c);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (gradient[i] != 0.0) out = out + gradient[i] * coordinate(m, i);
  }
  return out;
}

HarmonicExpr HarmonicExpr::harmonic_polynomial(Eigen::Index dim, std::vector<Monomial> terms) {
  if (dim < 1) throw DimensionError("dimension must be >= 1");
  std::map<std::vector<int>, double> merged;
  for (const auto& t : terms) {
    if (static_cast<Eigen::Index>(t.exponents.size()) != dim) {
      throw DimensionError("monomial exponent count differs from polynomial dimension");
    }
    if (std::any_of(t.exponents.begin(), t.exponents.end(), [](int e) { return e < 0; })) {
      throw PreconditionError("monomial exponents must be nonnegative");
    }
    require_finite(t.coefficient, "monomial coefficient");
    merged[t.exponents] += t.coefficient;
  }
  // Symbolic Laplacian: sum_i alpha_i (alpha_i - 1) c x^(alpha - 2 e_i).
  std::map<std::vector<int>, double> lap;
  double scale = 0.0;
  for (const auto& [alpha, c] : merged) {
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      if (alpha[i] < 2) continue;
      auto beta = alpha;
      beta[i] -= 2;
      const double k = static_cast<double>(alpha[i]) * static_cast<double>(alpha[i] - 1);
      lap[beta] += k * c;
      scale = std::max(scale, std::abs(k * c));
    }
  }
  for (const auto& [beta, c] : lap) {
    if (std::abs(c) > 1e-12 * std::max(scale, 1.0)) {
      throw PreconditionError("polynomial is not harmonic: symbolic Laplacian is nonzero");
    }
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Polynomial;
  n->dim = dim;
  for (const auto& [alpha, c] : merged) {
    if (c != 0.0) n->terms.push_back({c, alpha});
  }
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::real_part(const HoloExpr& h) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::RePart;
  n->dim = 2;
  n->holo = h;
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::imag_part(const HoloExpr& h) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::ImPart;
  n->dim = 2;
  n->holo = h;
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::poisson_kernel(const Point& zeta) {
  if (zeta.size() < 1) throw DimensionError("Poisson pole needs dimension >= 1");
  if (!zeta.allFinite() || !(zeta.norm() > 0.0)) {
    throw PreconditionError("Poisson pole must be a finite nonzero point");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::Poisson;
  n->dim = zeta.size();
  n->a = zeta;
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::exp_wave(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double phase) {
  if (a.size() != b.size() || a.size() < 1) throw DimensionError("exp_wave: a and b must share dimension");
  if (!a.allFinite() || !b.allFinite()) throw PreconditionError("exp_wave vectors must be finite");
  require_finite(phase, "exp_wave phase");
  const double scale = std::max({a.squaredNorm(), b.squaredNorm(), 1e-300});
  if (std::abs(a.squaredNorm() - b.squaredNorm()) > 1e-12 * scale ||
      std::abs(a.dot(b)) > 1e-12 * scale) {
    throw PreconditionError("exp_wave is harmonic only when |a| = |b| and a is orthogonal to b");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::ExpWave;
  n->dim = a.size();
  n->a = a;
  n->b = b;
  n->c = phase;
  return HarmonicExpr(std::move(n));
}

HarmonicExpr operator+(const HarmonicExpr& lhs, const HarmonicExpr& rhs) {
  if (lhs.dim() != rhs.dim()) throw DimensionError("sum of expressions with different dimensions");
  auto n = std::make_shared<HarmonicExpr::Node>();
  n->kind = Kind::Sum;
  n->dim = lhs.dim();
  n->args = {lhs, rhs};
  return HarmonicExpr(std::move(n));
}

HarmonicExpr operator-(const HarmonicExpr& lhs, const HarmonicExpr& rhs) { return lhs + (-1.0) * rhs; }

HarmonicExpr operator*(double k, const HarmonicExpr& e) {
  require_finite(k, "scalar multiple");
  auto n = std::make_shared<HarmonicExpr::Node>();
  n->kind = Kind::Scale;
  n->dim = e.dim();
  n->c = k;
  n->args = {e};
  return HarmonicExpr(std::move(n));
}

HarmonicExpr HarmonicExpr::precompose(const AffineChart& chart) const {
  if (chart.dim() != dim()) throw DimensionError("chart dimension differs from expression dimension");
  auto n = std::make_shared<Node>();
  n->kind = Kind::Chart;
  n->dim = dim();
  if (node_->kind == Kind::Chart) {
    // this(chart(x)) = inner(c_in(chart(x))).
    n->chart = node_->chart->after(chart);
    n->args = {node_->args.front()};
  } else {
    n->chart = chart;
    n->args = {*this};
  }
  return HarmonicExpr(std::move(n));
}

Eigen::Index HarmonicExpr::dim() const { return node_->dim; }

namespace {

ValueGradient eval_node(const HarmonicExpr::Node& n, const Point& x) {
  const Eigen::Index m = n.dim;
  switch (n.kind) {
    case Kind::Coordinate: {
      ValueGradient out{x[n.axis], Eigen::VectorXd::Zero(m)};
      out.gradient[n.axis] = 1.0;
      return out;
    }
    case Kind::Constant:
      return {n.c, Eigen::VectorXd::Zero(m)};
    case Kind::Sum: {
      ValueGradient out{0.0, Eigen::VectorXd::Zero(m)};
      for (const auto& arg : n.args) {
        const auto vg = arg.eval_with_gradient(x);
        out.value += vg.value;
        out.gradient += vg.gradient;
      }
      return out;
    }
    case Kind::Scale: {
      auto vg = n.args.front().eval_with_gradient(x);
      vg.value *= n.c;
      vg.gradient *= n.c;
      return vg;
    }
    case Kind::Polynomial: {
      ValueGradient out{0.0, Eigen::VectorXd::Zero(m)};
      for (const auto& t : n.terms) {
        double v = t.coefficient;
        for (Eigen::Index i = 0; i < m; ++i) v *= ipow(x[i], t.exponents[static_cast<std::size_t>(i)]);
        out.value += v;
        for (Eigen::Index j = 0; j < m; ++j) {
          const int ej = t.exponents[static_cast<std::size_t>(j)];
          if (ej == 0) continue;
          double g = t.coefficient * ej;
          for (Eigen::Index i = 0; i < m; ++i) {
            const int e = t.exponents[static_cast<std::size_t>(i)] - (i == j ? 1 : 0);
            g *= ipow(x[i], e);
          }
          out.gradient[j] += g;
        }
      }
      return out;
    }
    case Kind::RePart:
    case Kind::ImPart: {
      const auto j = n.holo->jet({x[0], x[1]});
      // d/dx h = h', d/dy h = i h'.
      Eigen::VectorXd g(2);
      if (n.kind == Kind::RePart) {
        g << j.derivative.real(), -j.derivative.imag();
        return {j.value.real(), g};
      }
      g << j.derivative.imag(), j.derivative.real();
      return {j.value.imag(), g};
    }
    case Kind::Chart: {
      auto vg = n.args.front().eval_with_gradient(n.chart->apply(x));
      vg.gradient *= n.chart->scale;
      return vg;
    }
    case Kind::Poisson: {
      const Eigen::VectorXd& zeta = n.a;
      const double rho2 = zeta.squaredNorm();
      const double rho = std::sqrt(rho2);
      const Eigen::VectorXd diff = x - zeta;
      const double d2 = diff.squaredNorm();
      const double dm = std::pow(d2, 0.5 * static_cast<double>(m));
      const double k = std::pow(rho, static_cast<double>(m - 2));
      const double num = rho2 - x.squaredNorm();
      ValueGradient out{k * num / dm, Eigen::VectorXd()};
      out.gradient = k * (-2.0 * x / dm - num * static_cast<double>(m) * diff / (dm * d2));
      return out;
    }
    case Kind::ExpWave: {
      const double e = std::exp(n.a.dot(x));
      const double t = n.b.dot(x) + n.c;
      const double ct = std::cos(t);
      const double st = std::sin(t);
      return {e * ct, e * (ct * n.a - st * n.b)};
    }
  }
  return {0.0, Eigen::VectorXd::Zero(m)};
}

}  // namespace

ValueGradient HarmonicExpr::eval_with_gradient(const Point& x) const {
  if (x.size() != dim()) {
    throw DimensionError("point has dimension " + std::to_string(x.size()) + ", expression has " +
                         std::to_string(dim()));
  }
  auto vg = eval_node(*node_, x);
  if (!std::isfinite(vg.value) || !vg.gradient.allFinite()) {
    throw NumericError("harmonic expression overflowed (non-finite value or gradient)");
  }
  return vg;
}

double HarmonicExpr::eval(const Point& x) const { return eval_with_gradient(x).value; }

std::optional<HoloExpr> HarmonicExpr::holomorphic_parent() const {
  if (node_->kind == Kind::RePart || node_->kind == Kind::ImPart) return node_->holo;
  return std::nullopt;
}

bool HarmonicExpr::is_imaginary_part() const { return node_->kind == Kind::ImPart; }

std::string HarmonicExpr::to_string() const {
  const Node& n = *node_;
  const std::string m = std::to_string(n.dim);
  switch (n.kind) {
    case Kind::Coordinate:
      return "(coord " + m + " " + std::to_string(n.axis) + ")";
    case Kind::Constant:
      return "(const " + m + " " + format_number(n.c) + ")";
    case Kind::Sum: {
      std::string s = "(sum";
      for (const auto& a : n.args) s += " " + a.to_string();
      return s + ")";
    }
    case Kind::Scale:
      return "(scale " + format_number(n.c) + " " + n.args.front().to_string() + ")";
    case Kind::Polynomial: {
      std::string s = "(hpoly " + m;
      for (const auto& t : n.terms) {
        s += " (" + format_number(t.coefficient);
        for (int e : t.exponents) s += " " + std::to_string(e);
        s += ")";
      }
      return s + ")";
    }
    case Kind::RePart:
      return "(re " + n.holo->to_string() + ")";
    case Kind::ImPart:
      return "(im " + n.holo->to_string() + ")";
    case Kind::Chart:
      return "(chart " + format_number(n.chart->scale) + " " + format_vector(n.chart->center) + " " +
             n.args.front().to_string() + ")";
    case Kind::Poisson:
      return "(poisson " + format_vector(n.a) + ")";
    case Kind::ExpWave:
      return "(expwave " + format_vector(n.a) + " " + format_vector(n.b) + " " + format_number(n.c) + ")";
  }
  return "";
}

HarmonicExpr HarmonicExpr::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

HarmonicExpr HarmonicExpr::from_sexpr(const SExpr& e) {
  if (!e.is_list) parse_fail(e, "expected a harmonic expression form, found atom '" + e.atom + "'");
  const std::string& h = e.head();
  try {
    if (h == "coord") {
      expect_arity(e, 2);
      return coordinate(to_dim(e.arg(0)), static_cast<Eigen::Index>(to_integer(e.arg(1))));
    }
    if (h == "const") {
      expect_arity(e, 2);
      return constant(to_dim(e.arg(0)), to_number(e.arg(1)));
    }
    if (h == "sum") {
      if (e.arity() < 1) parse_fail(e, "sum needs at least one argument");
      HarmonicExpr acc = from_sexpr(e.arg(0));
      if (e.arity() == 1) return acc;
      auto n = std::make_shared<Node>();
      n->kind = Kind::Sum;
      n->dim = acc.dim();
      n->args.push_back(acc);
      for (std::size_t i = 1; i < e.arity(); ++i) {
        auto next = from_sexpr(e.arg(i));
        if (next.dim() != n->dim) parse_fail(e.arg(i), "sum operands differ in dimension");
        n->args.push_back(next);
      }
      return HarmonicExpr(std::move(n));
    }
    if (h == "scale") {
      expect_arity(e, 2);
      return to_number(e.arg(0)) * from_sexpr(e.arg(1));
    }
    if (h == "hpoly") {
      if (e.arity() < 1) parse_fail(e, "hpoly needs a dimension");
      const Eigen::Index m = to_dim(e.arg(0));
      std::vector<Monomial> terms;
      for (std::size_t i = 1; i < e.arity(); ++i) {
        const auto v = to_numbers(e.arg(i));
        if (static_cast<Eigen::Index>(v.size()) != m + 1) {
          parse_fail(e.arg(i), "hpoly term must be (COEF e_1 ... e_M)");
        }
        Monomial t;
        t.coefficient = v[0];
        for (std::size_t k = 1; k < v.size(); ++k) {
          if (v[k] != std::floor(v[k]) || v[k] < 0) parse_fail(e.arg(i), "exponents must be nonnegative integers");
          t.exponents.push_back(static_cast<int>(v[k]));
        }
        terms.push_back(std::move(t));
      }
      return harmonic_polynomial(m, std::move(terms));
    }
    if (h == "re" || h == "im") {
      expect_arity(e, 1);
      const auto holo = HoloExpr::from_sexpr(e.arg(0));
      return h == "re" ? real_part(holo) : imag_part(holo);
    }
    if (h == "chart") {
      expect_arity(e, 3);
      const double s = to_number(e.arg(0));
      const auto c = to_vector(e.arg(1));
      return from_sexpr(e.arg(2)).precompose(AffineChart(s, c));
    }
    if (h == "poisson") {
      expect_arity(e, 1);
      return poisson_kernel(to_vector(e.arg(0)));
    }
    if (h == "expwave") {
      expect_arity(e, 3);
      return exp_wave(to_vector(e.arg(0)), to_vector(e.arg(1)), to_number(e.arg(2)));
    }
  } catch (const ParseError&) {
    throw;
  } catch (const Error& err) {
    parse_fail(e, err.what());
  }
  parse_fail(e, "unknown harmonic form '" + h + "'");
}

}  // namespace renormlab
