#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace renormlab {

/// Minimal s-expression node shared by the expression and domain grammars.
/// Comments start with ';' and run to end of line.
struct SExpr {
  bool is_list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;

  bool is_atom() const { return !is_list; }
  /// First atom of a list form, or "" when absent.
  const std::string& head() const;
  /// Items after the head.
  std::size_t arity() const { return items.empty() ? 0 : items.size() - 1; }
  const SExpr& arg(std::size_t i) const { return items.at(i + 1); }
};

/// Parses exactly one s-expression; trailing non-space input is an error.
SExpr parse_sexpr(std::string_view text);

/// Throws ParseError located at `at`.
[[noreturn]] void parse_fail(const SExpr& at, const std::string& message);

double to_number(const SExpr& e);
long to_integer(const SExpr& e);
std::vector<double> to_numbers(const SExpr& e);
void expect_arity(const SExpr& e, std::size_t n);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

}  // namespace renormlab
