#include <doctest.h>

#include <cmath>
#include <random>

#include <Eigen/LU>

#include <renormlab/errors.hpp>
#include <renormlab/group_targets.hpp>

#include "oracles.hpp"

using namespace renormlab;
using doctest::Approx;

namespace {

const HoloExpr Z = HoloExpr::z();

HoloExpr cst(Complex c) { return HoloExpr::constant(c); }

Point pt(double x, double y) { return point({x, y}); }

CMatrix random_matrix(std::mt19937_64& rng, int n) {
  CMatrix M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = {oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1)};
  return M;
}

CMatrix nilpotent() {
  CMatrix X = CMatrix::Zero(2, 2);
  X(0, 1) = 1.0;
  return X;
}

// exp(zX) by the power series, independent of the library.
CMatrix series_exp(const CMatrix& X, Complex z) {
  CMatrix term = CMatrix::Identity(X.rows(), X.cols()), sum = term;
  for (int k = 1; k < 80; ++k) {
    term = term * (z * X) / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

// Central differences of F at z along the real axis.
CMatrix fd_derivative(const MatrixHoloMap& F, Complex z, double h = 1e-5) {
  return (F.value(z + h) - F.value(z - h)) / (2 * h);
}

MatrixHoloMap left_multiply(const CMatrix& g, const MatrixHoloMap& F) {
  const Eigen::Index n = F.n();
  std::vector<HoloExpr> out;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      HoloExpr e = cst(0.0);
      for (Eigen::Index k = 0; k < n; ++k) e = e + cst(g(i, k)) * F.entries()[static_cast<std::size_t>(k * n + j)];
      out.push_back(e);
    }
  return MatrixHoloMap(n, out);
}

std::vector<int> geometric(int start, double growth, int steps) {
  std::vector<int> v;
  double k = start;
  for (int i = 0; i < steps; ++i, k *= growth) v.push_back(static_cast<int>(std::lround(k)));
  return v;
}

GroupRenormOptions light_group() {
  GroupRenormOptions o;
  o.rescaling.budget.refinement_levels = 1;
  return o;
}

LieOptions light_lie() {
  LieOptions o;
  o.rescaling.budget.refinement_levels = 1;
  return o;
}

}  // namespace

TEST_CASE("quotient distance") {
  Eigen::VectorXd a(2), b(2);
  a << 0.1, 0.9;
  b << 2.95, -0.05;
  CHECK(quotient_distance(a, b) == Approx(std::hypot(0.15, 0.05)));
  CHECK(quotient_distance(a, a + Eigen::VectorXd::Constant(2, 7.0)) == 0.0);
}

TEST_CASE("matrix Df examples") {
  SUBCASE("nilpotent exponential") {
    const MatrixHoloMap F = MatrixHoloMap::parse("(matrix 2 1 z 0 1)");
    for (Complex z : {Complex(0, 0), Complex(1.5, -2), Complex(-3, 0.25)}) {
      const CMatrix D = matrix_Df(F, z);
      CHECK((D - nilpotent()).norm() <= 1e-14);
    }
  }
  SUBCASE("scalar exp(z^2)") {
    const MatrixHoloMap F(1, {HoloExpr::exp(Z * Z)});
    for (Complex z : {Complex(0.3, 0.1), Complex(-1, 2)}) CHECK(std::abs(matrix_Df(F, z)(0, 0) - 2.0 * z) <= 1e-12);
  }
  SUBCASE("g exp(zX)") {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 10; ++t) {
      const CMatrix g = random_matrix(rng, 2), X = random_matrix(rng, 2);
      const auto F = exp_family(g, X, 1.0);
      const Complex z(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
      CHECK((matrix_Df(F, z) - X).norm() <= 1e-9 * std::max(1.0, X.norm()));
    }
  }
}

TEST_CASE("matrix derivative agrees with central differences") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 50; ++t) {
    const int n = 1 + static_cast<int>(rng() % 3);
    std::vector<HoloExpr> es;
    for (int i = 0; i < n * n; ++i) {
      const Complex a(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
      const Complex b(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
      es.push_back(HoloExpr::polynomial({b, a, 0.5 * a}) + cst(b) * HoloExpr::exp(cst(a) * Z));
    }
    const MatrixHoloMap F(n, es);
    const Complex z(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
    const CMatrix exact = F.derivative(z), fd = fd_derivative(F, z);
    CHECK((exact - fd).norm() <= 1e-6 * std::max(1.0, exact.norm()));
  }
}

TEST_CASE("Df is left invariant") {
  std::mt19937_64 rng(5);
  for (int t = 0; t < 20; ++t) {
    const MatrixHoloMap F(2, {HoloExpr::exp(Z), Z, cst(0.5) * Z * Z, HoloExpr::exp(cst(-1.0) * Z) + cst(1.0)});
    CMatrix g = random_matrix(rng, 2);
    if (std::abs(g.determinant()) < 0.1) g += CMatrix::Identity(2, 2);
    const Complex z(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
    const CMatrix a = matrix_Df(F, z), b = matrix_Df(left_multiply(g, F), z);
    CHECK((a - b).norm() <= 1e-10 * std::max(1.0, a.norm()));
  }
}

TEST_CASE("singular values are reported with the determinant") {
  const MatrixHoloMap F = MatrixHoloMap::parse("(matrix 2 z 0 0 1)");
  try {
    matrix_Df(F, 0.0);
    FAIL("expected a singular matrix error");
  } catch (const SingularMatrixError& e) {
    CHECK(e.determinant_magnitude() == 0.0);
  }
  CHECK_NOTHROW(matrix_Df(F, 1.0));
}

TEST_CASE("expm examples") {
  CHECK((expm(CMatrix::Zero(3, 3), {2, -1}) - CMatrix::Identity(3, 3)).norm() == 0.0);
  CMatrix expect(2, 2);
  expect << 1.0, 3.0, 0.0, 1.0;
  CHECK((expm(nilpotent(), 3.0) - expect).norm() <= 1e-14);
  CMatrix D = CMatrix::Zero(2, 2);
  D(0, 0) = 1.0;
  D(1, 1) = -1.0;
  const CMatrix e = expm(D, std::log(2.0));
  CHECK(std::abs(e(0, 0) - 2.0) <= 1e-14);
  CHECK(std::abs(e(1, 1) - 0.5) <= 1e-14);
  CHECK(std::abs(e(0, 1)) == 0.0);
}

TEST_CASE("expm inverse identity and series oracle") {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 100; ++t) {
    const int n = 1 + static_cast<int>(rng() % 4);
    CMatrix X = random_matrix(rng, n);
    Complex z(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
    const double size = std::abs(z) * X.norm();
    z *= oracle::uniform(rng, 0, 10) / size;  // |z X| <= 10
    const CMatrix P = expm(X, z) * expm(X, -z);
    CHECK((P - CMatrix::Identity(n, n)).norm() <= 1e-10);
    if (std::abs(z) * X.norm() <= 3.0) {
      const CMatrix S = series_exp(X, z);
      CHECK((expm(X, z) - S).norm() <= 1e-12 * S.norm());
    }
  }
}

TEST_CASE("exp family matches expm") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const CMatrix g = random_matrix(rng, 2), X = random_matrix(rng, 2);
    const auto F = exp_family(g, X, 1.5);
    const Complex z(oracle::uniform(rng, -1, 1), oracle::uniform(rng, -1, 1));
    CHECK((F.value(z) - g * expm(X, 1.5 * z)).norm() <= 1e-10 * F.value(z).norm());
  }
  CHECK_THROWS_AS(exp_family(CMatrix::Identity(2, 2), nilpotent(), 1.0), PreconditionError);
}

TEST_CASE("matrix map text round trip") {
  const auto F = MatrixHoloMap::parse("(matrix 2 (exp z) z (c 0 1) (poly 1 2))");
  const auto G = MatrixHoloMap::parse(F.to_string());
  CHECK(G.to_string() == F.to_string());
  CHECK((G.value({0.3, 0.4}) - F.value({0.3, 0.4})).norm() == 0.0);
  CHECK_THROWS_AS(MatrixHoloMap::parse("(matrix 2 z z z)"), ParseError);
}

TEST_CASE("torus renormalization") {
  const auto opts = light_group();
  SUBCASE("(k x1)") {
    const TorusSequence seq = [](int k) {
      Eigen::VectorXd g(1);
      g << k;
      return TorusMap{HarmonicMap({HarmonicExpr::affine(0.0, g)})};
    };
    const Point p = point({0.0});
    const auto r = torus_renormalize(seq, p, geometric(10, 2, 6), opts);
    CHECK(r.limit.cls == ComponentClass::AffineNonconstant);
    CHECK(r.limit.derivative_spread <= 1e-12);
    CHECK(std::abs(r.limit.linear(0, 0)) == Approx(1.0));
  }
  SUBCASE("(Re (kz)^2, Im (kz)^2)") {
    const TorusSequence seq = [](int k) {
      const double s = static_cast<double>(k) * k;
      return TorusMap{HarmonicMap::holomorphic_pair(cst(s) * Z * Z, cst({0, -s}) * Z * Z)};
    };
    const auto r = torus_renormalize(seq, pt(1, 0), geometric(20, 1.5, 8), opts);
    CHECK(r.limit.cls == ComponentClass::AffineNonconstant);
    CHECK(r.limit.residual <= 1e-2);
    CHECK(r.limit.derivative_spread <= 1e-2);
    // The differential of the limit has Frobenius norm 1 after rescaling.
    CHECK(r.limit.linear.norm() == Approx(1.0).epsilon(1e-2));
  }
  SUBCASE("constant maps") {
    const TorusSequence seq = [](int) { return TorusMap{HarmonicMap({HarmonicExpr::constant(2, 0.3)})}; };
    CHECK_THROWS_AS(torus_renormalize(seq, pt(0, 0), {1, 2, 4, 8}, opts), PreconditionError);
  }
  SUBCASE("lifts differing by integers agree") {
    auto make = [](double shift) {
      return TorusSequence([shift](int k) {
        const double s = static_cast<double>(k) * k;
        const auto c = HarmonicExpr::constant(2, shift);
        const auto H = HarmonicMap::holomorphic_pair(cst(s) * Z * Z, cst({0, -s}) * Z * Z);
        return TorusMap{HarmonicMap({H.components()[0] + c, H.components()[1] - c})};
      });
    };
    const auto a = torus_renormalize(make(0.0), pt(1, 0), geometric(20, 1.5, 5), opts);
    const auto b = torus_renormalize(make(3.0), pt(1, 0), geometric(20, 1.5, 5), opts);
    REQUIRE(a.trace.steps.size() == b.trace.steps.size());
    for (std::size_t i = 0; i < a.trace.steps.size(); ++i) {
      CHECK(a.trace.steps[i].phi_selected == b.trace.steps[i].phi_selected);
      CHECK((a.trace.steps[i].chart.center - b.trace.steps[i].chart.center).norm() == 0.0);
    }
    CHECK((a.limit.linear - b.limit.linear).norm() == 0.0);
    CHECK(a.limit.derivative_spread == b.limit.derivative_spread);
    CHECK(a.limit.cls == b.limit.cls);
  }
  SUBCASE("bounded lifts are constant") {
    // The only bounded harmonic expressions the library builds are constants.
    const auto c = HarmonicExpr::constant(2, 4.0);
    const auto g = c.eval_with_gradient(pt(10, -7)).gradient;
    CHECK(g.norm() == 0.0);
  }
}

TEST_CASE("constant adjusted renormalization") {
  const auto opts = light_group();
  SUBCASE("runaway constants") {
    const MapSequence seq = [](int k) {
      Eigen::VectorXd g(2);
      g << k, 0.0;
      return HarmonicMap({HarmonicExpr::affine(static_cast<double>(k) * k, g)});
    };
    const auto r = constant_adjusted_renormalize(seq, pt(0, 0), geometric(10, 2, 6), opts);
    REQUIRE(r.shifts.size() == r.trace.steps.size());
    for (std::size_t i = 0; i < r.shifts.size(); ++i) {
      const double k = r.trace.steps[i].n;
      const auto& b = r.trace.steps[i].chart.center;
      CHECK(r.shifts[i][0] == Approx(-(k * k + k * b[0])));
    }
    CHECK(r.limit.cls == ComponentClass::AffineNonconstant);
    CHECK(std::abs(r.limit.constant[0]) <= 1e-9);
  }
  SUBCASE("Re exp(kz) at 0") {
    const MapSequence seq = [](int k) {
      return HarmonicMap({HarmonicExpr::real_part(HoloExpr::exp(cst(static_cast<double>(k)) * Z))});
    };
    const auto r = constant_adjusted_renormalize(seq, pt(0, 0), geometric(10, 1.5, 6), opts);
    CHECK(r.limit.cls == ComponentClass::AffineNonconstant);
    CHECK(r.limit.residual <= 1e-2);
  }
  SUBCASE("bounded values at the centres match the unshifted run") {
    const MapSequence seq = [](int k) {
      Eigen::VectorXd g(2);
      g << k, 0.0;
      return HarmonicMap({HarmonicExpr::affine(0.5, g)});
    };
    const auto shifted = constant_adjusted_renormalize(seq, pt(0, 0), geometric(10, 2, 6), opts);
    for (const auto& c : shifted.shifts) CHECK(std::abs(c[0]) <= 1.0);
    MapRenormOptions mo;
    mo.rescaling = opts.rescaling;
    const auto plain = map_renormalize(seq, pt(0, 0), geometric(10, 2, 6), mo);
    REQUIRE(shifted.components.size() == 1);
    CHECK(shifted.components[0] == plain.components[0]);
  }
}

TEST_CASE("lie renormalization") {
  const auto opts = light_lie();
  SUBCASE("nilpotent exponential") {
    const auto base = MatrixHoloMap::parse("(matrix 2 1 z 0 1)");
    const auto r = lie_renormalize([&](int k) { return base.precompose(static_cast<double>(k), 0.0); }, 0.0,
                                   geometric(20, 2, 5), opts);
    CHECK((r.X - nilpotent()).norm() <= 1e-12);
    CHECK(r.df_constancy <= 1e-8);
    CHECK(r.residual <= 1e-8);
    CHECK(r.nonconstant);
    for (const auto& s : r.trace.steps) CHECK(s.phi_selected == Approx(s.n));
  }
  SUBCASE("scalar exp((z + k)^2) has an exponential limit") {
    const MatrixSequence seq = [](int k) {
      return MatrixHoloMap(1, {HoloExpr::exp(HoloExpr::affine_argument(1.0, static_cast<double>(k), Z * Z))});
    };
    const auto r = lie_renormalize(seq, 0.0, {11, 13, 16, 20, 25}, opts);
    REQUIRE(r.X.rows() == 1);
    // U(z) -> exp(d z) with |d| = 1 after normalization.
    CHECK(std::abs(r.X(0, 0)) == Approx(1.0).epsilon(1e-2));
    CHECK(r.residual <= 1e-1);
    CHECK(r.nonconstant);
  }
  SUBCASE("synthetic families") {
    std::mt19937_64 rng(31);
    for (int n : {1, 2}) {
      for (int t = 0; t < 3; ++t) {
        const CMatrix g = random_matrix(rng, n);
        CMatrix X = random_matrix(rng, n);
        X /= X.norm();
        const auto base = exp_family(g, X, 1.0);
        const auto r = lie_renormalize([&](int k) { return base.precompose(static_cast<double>(k), 0.0); }, 0.0,
                                       {20, 40, 80}, opts);
        CHECK((r.X - X).norm() <= 1e-6);
        CHECK(r.residual <= 1e-8);
        CHECK((r.g - CMatrix::Identity(n, n)).norm() == 0.0);
        // anchor exp(zX) reproduces the last rescaled map.
        const auto& s = r.trace.steps.back();
        const Complex a = s.chart.scale, b(s.chart.center[0], s.chart.center[1]);
        const Complex z(0.3, -0.2);
        const CMatrix lhs = base.precompose(static_cast<double>(s.n), 0.0).value(a * z + b);
        CHECK((lhs - r.anchor * expm(r.X, z)).norm() <= 1e-8 * lhs.norm());
      }
    }
  }
  SUBCASE("constant families are rejected") {
    const auto F = MatrixHoloMap::parse("(matrix 2 2 1 0 1)");
    CHECK_THROWS_AS(lie_renormalize([&](int) { return F; }, 0.0, {1, 2, 4}, opts), PreconditionError);
  }
  SUBCASE("singular values during normalization name the step") {
    // det F_k(z) = k z vanishes at the centre.
    const MatrixSequence seq = [](int k) {
      return MatrixHoloMap(2, {cst(static_cast<double>(k)) * Z, cst(0.0), cst(0.0), cst(1.0)});
    };
    try {
      lie_renormalize(seq, 0.0, {10, 20, 40}, opts);
      FAIL("expected an error");
    } catch (const SingularMatrixError& e) {
      CHECK(std::string(e.what()).find("step") != std::string::npos);
    }
  }
}
