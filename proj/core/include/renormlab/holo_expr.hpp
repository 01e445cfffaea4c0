#pragma once

#include <complex>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "renormlab/sexpr.hpp"

namespace renormlab {

using Complex = std::complex<double>;

/// Value and complex derivative of a holomorphic expression at one point.
struct HoloJet {
  Complex value;
  Complex derivative;
};

/// Entire holomorphic expression in one complex variable z, built from
/// z, constants, sums, products, exp, polynomials and affine arguments
/// h(a z + b). Derivatives are exact (forward mode over the tree).
///
/// Text form:
///   z | (c RE IM) | (poly (RE IM) ...) | (add H ...) | (mul H ...)
///   | (exp H) | (affz (RE IM) (RE IM) H)
/// Polynomial coefficients are listed in ascending degree. A bare number is
/// accepted on input as a real constant or a real coefficient.
class HoloExpr {
public:
  HoloExpr();  // the constant 0

  static HoloExpr z();
  static HoloExpr constant(Complex c);
  static HoloExpr polynomial(std::vector<Complex> ascending_coeffs);
  static HoloExpr exp(const HoloExpr& arg);
  /// The expression z -> inner(a z + b).
  static HoloExpr affine_argument(Complex a, Complex b, const HoloExpr& inner);

  friend HoloExpr operator+(const HoloExpr& lhs, const HoloExpr& rhs);
  friend HoloExpr operator*(const HoloExpr& lhs, const HoloExpr& rhs);
  friend HoloExpr operator*(Complex k, const HoloExpr& e);

  Complex value(Complex z) const;
  /// Throws NumericError when the value or derivative is not finite.
  HoloJet jet(Complex z) const;

  std::string to_string() const;
  static HoloExpr parse(std::string_view text);
  static HoloExpr from_sexpr(const SExpr& e);

  struct Node;

private:
  explicit HoloExpr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

}  // namespace renormlab
