#include "renormlab/holo_expr.hpp"

#include <cmath>
#include <utility>

#include "renormlab/errors.hpp"

namespace renormlab {

struct HoloExpr::Node {
  enum class Kind { Z, Constant, Polynomial, Add, Mul, Exp, AffineArg };
  Kind kind = Kind::Constant;
  Complex c{0.0, 0.0};
  Complex a{1.0, 0.0};
  Complex b{0.0, 0.0};
  std::vector<Complex> coeffs;
  std::vector<HoloExpr> args;
};

namespace {

using Kind = HoloExpr::Node::Kind;

HoloJet eval_jet(const HoloExpr::Node& n, Complex z);

HoloJet child_jet(const HoloExpr& e, Complex z);

std::string format_complex(Complex c) {
  return "(" + format_number(c.real()) + " " + format_number(c.imag()) + ")";
}

Complex to_complex(const SExpr& e) {
  if (e.is_atom()) return {to_number(e), 0.0};
  const auto v = to_numbers(e);
  if (v.size() != 2) parse_fail(e, "expected (RE IM)");
  return {v[0], v[1]};
}

}  // namespace

HoloExpr::HoloExpr() : HoloExpr(constant(0.0)) {}

HoloExpr HoloExpr::z() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Z;
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::constant(Complex c) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Constant;
  n->c = c;
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::polynomial(std::vector<Complex> ascending_coeffs) {
  if (ascending_coeffs.empty()) ascending_coeffs.emplace_back(0.0, 0.0);
  auto n = std::make_shared<Node>();
  n->kind = Kind::Polynomial;
  n->coeffs = std::move(ascending_coeffs);
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::exp(const HoloExpr& arg) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Exp;
  n->args = {arg};
  return HoloExpr(std::move(n));
}

HoloExpr HoloExpr::affine_argument(Complex a, Complex b, const HoloExpr& inner) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::AffineArg;
  n->a = a;
  n->b = b;
  n->args = {inner};
  return HoloExpr(std::move(n));
}

HoloExpr operator+(const HoloExpr& lhs, const HoloExpr& rhs) {
  auto n = std::make_shared<HoloExpr::Node>();
  n->kind = Kind::Add;
  n->args = {lhs, rhs};
  return HoloExpr(std::move(n));
}

HoloExpr operator*(const HoloExpr& lhs, const HoloExpr& rhs) {
  auto n = std::make_shared<HoloExpr::Node>();
  n->kind = Kind::Mul;
  n->args = {lhs, rhs};
  return HoloExpr(std::move(n));
}

HoloExpr operator*(Complex k, const HoloExpr& e) { return HoloExpr::constant(k) * e; }

namespace {

HoloJet child_jet(const HoloExpr& e, Complex z) { return e.jet(z); }

HoloJet eval_jet(const HoloExpr::Node& n, Complex z) {
  switch (n.kind) {
    case Kind::Z:
      return {z, 1.0};
    case Kind::Constant:
      return {n.c, 0.0};
    case Kind::Polynomial: {
      Complex v = 0.0;
      Complex d = 0.0;
      for (auto it = n.coeffs.rbegin(); it != n.coeffs.rend(); ++it) {
        d = d * z + v;
        v = v * z + *it;
      }
      return {v, d};
    }
    case Kind::Add: {
      HoloJet out{0.0, 0.0};
      for (const auto& arg : n.args) {
        const auto j = child_jet(arg, z);
        out.value += j.value;
        out.derivative += j.derivative;
      }
      return out;
    }
    case Kind::Mul: {
      HoloJet out{1.0, 0.0};
      for (const auto& arg : n.args) {
        const auto j = child_jet(arg, z);
        out.derivative = out.derivative * j.value + out.value * j.derivative;
        out.value *= j.value;
      }
      return out;
    }
    case Kind::Exp: {
      const auto j = child_jet(n.args.front(), z);
      const Complex e = std::exp(j.value);
      return {e, e * j.derivative};
    }
    case Kind::AffineArg: {
      const auto j = child_jet(n.args.front(), n.a * z + n.b);
      return {j.value, n.a * j.derivative};
    }
  }
  return {0.0, 0.0};
}

bool finite(Complex c) { return std::isfinite(c.real()) && std::isfinite(c.imag()); }

}  // namespace

Complex HoloExpr::value(Complex z) const { return jet(z).value; }

HoloJet HoloExpr::jet(Complex z) const {
  const auto j = eval_jet(*node_, z);
  if (!finite(j.value) || !finite(j.derivative)) {
    throw NumericError("holomorphic expression overflowed at z = (" + format_number(z.real()) +
                       ", " + format_number(z.imag()) + ")");
  }
  return j;
}

std::string HoloExpr::to_string() const {
  const Node& n = *node_;
  switch (n.kind) {
    case Kind::Z:
      return "z";
    case Kind::Constant:
      return "(c " + format_number(n.c.real()) + " " + format_number(n.c.imag()) + ")";
    case Kind::Polynomial: {
      std::string s = "(poly";
      for (const auto& c : n.coeffs) s += " " + format_complex(c);
      return s + ")";
    }
    case Kind::Add:
    case Kind::Mul: {
      std::string s = n.kind == Kind::Add ? "(add" : "(mul";
      for (const auto& a : n.args) s += " " + a.to_string();
      return s + ")";
    }
    case Kind::Exp:
      return "(exp " + n.args.front().to_string() + ")";
    case Kind::AffineArg:
      return "(affz " + format_complex(n.a) + " " + format_complex(n.b) + " " +
             n.args.front().to_string() + ")";
  }
  return "";
}

HoloExpr HoloExpr::parse(std::string_view text) { return from_sexpr(parse_sexpr(text)); }

HoloExpr HoloExpr::from_sexpr(const SExpr& e) {
  if (e.is_atom()) {
    if (e.atom == "z") return z();
    return constant(to_number(e));
  }
  const std::string& h = e.head();
  if (h == "c") {
    expect_arity(e, 2);
    return constant({to_number(e.arg(0)), to_number(e.arg(1))});
  }
  if (h == "poly") {
    std::vector<Complex> coeffs;
    for (std::size_t i = 0; i < e.arity(); ++i) coeffs.push_back(to_complex(e.arg(i)));
    if (coeffs.empty()) parse_fail(e, "poly needs at least one coefficient");
    return polynomial(std::move(coeffs));
  }
  if (h == "add" || h == "mul") {
    if (e.arity() < 1) parse_fail(e, "'" + h + "' needs at least one argument");
    auto n = std::make_shared<Node>();
    n->kind = h == "add" ? Kind::Add : Kind::Mul;
    for (std::size_t i = 0; i < e.arity(); ++i) n->args.push_back(from_sexpr(e.arg(i)));
    return HoloExpr(std::move(n));
  }
  if (h == "exp") {
    expect_arity(e, 1);
    return exp(from_sexpr(e.arg(0)));
  }
  if (h == "affz") {
    expect_arity(e, 3);
    return affine_argument(to_complex(e.arg(0)), to_complex(e.arg(1)), from_sexpr(e.arg(2)));
  }
  parse_fail(e, "unknown holomorphic form '" + h + "'");
}

}  // namespace renormlab
