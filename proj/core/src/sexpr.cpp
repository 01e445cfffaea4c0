#include "renormlab/sexpr.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <system_error>

#include "renormlab/errors.hpp"

namespace renormlab {
namespace {

class Reader {
public:
  explicit Reader(std::string_view text) : text_(text) {}

  SExpr read_one() {
    skip_space();
    if (at_end()) throw ParseError("empty input", line_, col_);
    SExpr e = read();
    skip_space();
    if (!at_end()) throw ParseError("unexpected trailing input", line_, col_);
    return e;
  }

private:
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (!at_end()) {
      const char c = peek();
      if (c == ';') {
        while (!at_end() && peek() != '\n') advance();
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr read() {
    SExpr e;
    e.line = line_;
    e.column = col_;
    if (peek() == '(') {
      e.is_list = true;
      advance();
      for (;;) {
        skip_space();
        if (at_end()) throw ParseError("unterminated list", e.line, e.column);
        if (peek() == ')') {
          advance();
          break;
        }
        e.items.push_back(read());
      }
      return e;
    }
    if (peek() == ')') throw ParseError("unexpected ')'", line_, col_);
    while (!at_end()) {
      const char c = peek();
      if (c == '(' || c == ')' || c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ';') {
        break;
      }
      e.atom.push_back(c);
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

}  // namespace

const std::string& SExpr::head() const {
  static const std::string empty;
  if (!is_list || items.empty() || !items.front().is_atom()) return empty;
  return items.front().atom;
}

SExpr parse_sexpr(std::string_view text) { return Reader(text).read_one(); }

void parse_fail(const SExpr& at, const std::string& message) {
  throw ParseError(message, at.line, at.column);
}

double to_number(const SExpr& e) {
  if (!e.is_atom()) parse_fail(e, "expected a number, found a list");
  const std::string& s = e.atom;
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const char* first = s.data();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || std::isnan(v)) {
    parse_fail(e, "expected a number, found '" + s + "'");
  }
  return v;
}

long to_integer(const SExpr& e) {
  const double v = to_number(e);
  if (!std::isfinite(v) || v != std::floor(v)) parse_fail(e, "expected an integer");
  return static_cast<long>(v);
}

std::vector<double> to_numbers(const SExpr& e) {
  if (!e.is_list) parse_fail(e, "expected a list of numbers");
  std::vector<double> out;
  out.reserve(e.items.size());
  for (const auto& item : e.items) out.push_back(to_number(item));
  return out;
}

void expect_arity(const SExpr& e, std::size_t n) {
  if (e.arity() != n) {
    parse_fail(e, "'" + e.head() + "' expects " + std::to_string(n) + " argument(s), got " +
                      std::to_string(e.arity()));
  }
}

std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // folds -0 so text output is stable
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw NumericError("format_number: conversion failed");
  return std::string(buf, ptr);
}

}  // namespace renormlab
