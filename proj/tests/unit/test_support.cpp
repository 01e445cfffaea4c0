#include <doctest.h>

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <random>
#include <stdexcept>

#include <renormlab/errors.hpp>
#include <renormlab/library.hpp>
#include <renormlab/normality.hpp>
#include <renormlab/parallel.hpp>
#include <renormlab/report_json.hpp>
#include <renormlab/sexpr.hpp>
#include <renormlab/tube.hpp>

#include "oracles.hpp"

using namespace renormlab;
using doctest::Approx;

namespace {

struct ThreadsEnv {
  explicit ThreadsEnv(const char* v) { setenv("RENORMLAB_THREADS", v, 1); }
  ~ThreadsEnv() { unsetenv("RENORMLAB_THREADS"); }
};

}  // namespace

TEST_CASE("s-expression parsing") {
  const auto e = parse_sexpr("(add z ; comment\n  (c 1 -2.5e3))");
  REQUIRE(e.is_list);
  CHECK(e.head() == "add");
  CHECK(e.arity() == 2);
  CHECK(e.arg(0).atom == "z");
  CHECK(to_numbers(parse_sexpr("(1 2 -3)")) == std::vector<double>{1, 2, -3});
  CHECK(to_number(e.arg(1).items[2]) == -2500.0);
  CHECK(e.arg(1).line == 2);
  CHECK(e.arg(1).column == 3);
  CHECK_THROWS_AS(parse_sexpr("(a b"), ParseError);
  CHECK_THROWS_AS(parse_sexpr("(a) b"), ParseError);
  CHECK_THROWS_AS(parse_sexpr(")"), ParseError);
  CHECK_THROWS_AS(to_number(parse_sexpr("1.5x")), ParseError);
  CHECK(to_integer(parse_sexpr("42")) == 42);
  CHECK_THROWS_AS(to_integer(parse_sexpr("4.2")), ParseError);
  try {
    parse_sexpr("(a\n   (b c)\n  ))");
    FAIL("expected a parse error");
  } catch (const ParseError& err) {
    CHECK(err.line() == 3);
  }
}

TEST_CASE("number formatting round trips") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 2000; ++i) {
    const double v = std::ldexp(oracle::uniform(rng, -1, 1), static_cast<int>(rng() % 200) - 100);
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(3.0) == "3");
}

TEST_CASE("boxes and grids") {
  const Box b({Interval{-1, 1}, Interval{0, 4}});
  CHECK(b.contains(point({0.5, 4.0})));
  CHECK_FALSE(b.contains(point({1.5, 1.0})));
  CHECK(b.contains(Box::cube(2, 0, 1)));
  CHECK(b.center() == point({0.0, 2.0}));
  CHECK(b.max_side() == 4.0);
  const GridSpec g(b, 5);
  CHECK(g.size() == 25);
  CHECK(g.spacing(1) == 1.0);
  CHECK(g.node(0) == point({-1.0, 0.0}));
  CHECK(g.node(1) == point({-1.0, 1.0}));
  CHECK(g.node(24) == point({1.0, 4.0}));
  const GridSpec r = g.refined();
  CHECK(r.points_per_axis() == 9);
  // Nested: every coarse node is a fine node.
  for (const auto& x : g.nodes()) {
    bool found = false;
    for (const auto& y : r.nodes()) found = found || (x - y).norm() == 0.0;
    CHECK(found);
  }
  const AffineChart inner(2.0, point({1.0, 0.0})), outer(0.5, point({0.0, 3.0}));
  const Point x = point({0.3, -0.7});
  CHECK((outer.after(inner).apply(x) - outer.apply(inner.apply(x))).norm() <= 1e-15);
  CHECK(lex_less(point({0.0, 1.0}), point({0.0, 2.0})));
  CHECK_FALSE(lex_less(point({1.0, 0.0}), point({0.0, 2.0})));
  CHECK(distance(point({0, 0}), point({3, 4})) == 5.0);
}

TEST_CASE("parallel loops are deterministic") {
  const std::size_t n = 10000;
  auto run = [&] {
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = std::sin(static_cast<double>(i)) * std::exp(1e-4 * i); });
    return out;
  };
  std::vector<double> serial, threaded;
  {
    ThreadsEnv env("1");
    CHECK(worker_count() == 1);
    serial = run();
  }
  {
    ThreadsEnv env("4");
    CHECK(worker_count() == 4);
    threaded = run();
  }
  CHECK(serial == threaded);
  {
    ThreadsEnv env("bogus");
    CHECK(worker_count() >= 1);
  }
  ThreadsEnv env("3");
  std::atomic<int> calls{0};
  try {
    parallel_for(n, [&](std::size_t i) {
      ++calls;
      if (i == 9000 || i == 100) throw std::runtime_error("fail at " + std::to_string(i));
    });
    FAIL("expected a rethrow");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()) == "fail at 100");
  }
}

TEST_CASE("threaded scans match serial scans") {
  std::vector<HarmonicExpr> fam;
  for (int k = 1; k <= 8; ++k) fam.push_back(HarmonicExpr::real_part(HoloExpr::exp(HoloExpr::constant(k * 0.5) * HoloExpr::z())));
  const Box K = Box::cube(2, -1, 1);
  NormalityReport a, b;
  {
    ThreadsEnv env("1");
    a = marty_bound(FamilySample(fam, K), K, 101);
  }
  {
    ThreadsEnv env("4");
    b = marty_bound(FamilySample(fam, K), K, 101);
  }
  CHECK(a.sup == b.sup);
  CHECK(a.argmax.index == b.argmax.index);
  CHECK(a.argmax.point == b.argmax.point);
}

TEST_CASE("json reports") {
  CHECK(to_json(Eigen::VectorXd(Eigen::VectorXd::Constant(2, std::numeric_limits<double>::infinity()))).dump() == R"(["inf","inf"])");
  Eigen::VectorXd v(3);
  v << -std::numeric_limits<double>::infinity(), std::nan(""), 1.5;
  CHECK(to_json(v).dump() == R"(["-inf","nan",1.5])");
  CMatrix m(1, 2);
  m << Complex(1, 2), Complex(0, -1);
  CHECK(to_json(m).dump() == "[[[1.0,2.0],[0.0,-1.0]]]");

  const auto t = classify_tube(exp_cusp());
  const Json j = to_json(t);
  CHECK(j.at("kobayashi") == "Hyperbolic");
  CHECK(j.at("brody") == "Hyperbolic");
  CHECK(j.at("hull").at("class") == "InHalfPlane");
  CHECK(j.at("evidence").is_array());
  CHECK(to_json(classify_tube(exp_cusp())).dump() == j.dump());

  const Box K = Box::cube(2, -1, 1);
  const auto r = marty_bound(FamilySample({HarmonicExpr::real_part(HoloExpr::z() * HoloExpr::z())}, K), K, 11, 1.0);
  const Json n = to_json(r);
  CHECK(n.at("verdict") == "UnboundedDerivative");
  CHECK(n.at("witness").at("index") == 0);
  CHECK(n.at("witness").at("point").size() == 2);
  CHECK(n.at("sup").get<double>() == r.sup);
}

TEST_CASE("catalog entries parse back to the same objects") {
  for (const auto& e : catalog()) {
    if (e.kind == "domain") {
      const auto d = catalog_domain(e.name);
      REQUIRE(d.has_value());
      CHECK(DomainExpr::parse(e.text).to_string() == d->to_string());
    } else if (e.kind == "expression") {
      const auto f = catalog_expression(e.name);
      REQUIRE(f.has_value());
      CHECK(HarmonicExpr::parse(e.text).to_string() == f->to_string());
    } else {
      REQUIRE(e.kind == "curve");
      CHECK(catalog_curve(e.name).has_value());
    }
  }
  CHECK_FALSE(catalog_domain("no_such_domain").has_value());
}
