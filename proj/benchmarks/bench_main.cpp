#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "renormlab/field_ops.hpp"
#include "renormlab/group_targets.hpp"
#include "renormlab/library.hpp"
#include "renormlab/renorm_engine.hpp"
#include "renormlab/tube.hpp"

using namespace renormlab;

namespace {

void BM_TildeDerivative(benchmark::State& state) {
  const auto f = *catalog_expression("re_z2_plus_exp");
  Point x(2);
  x << 0.3, 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(tilde_derivative(f, x));
}
BENCHMARK(BM_TildeDerivative);

void BM_ZalcmanFinite(benchmark::State& state) {
  const auto n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<Point> pts;
  for (int i = 0; i < n; ++i) pts.push_back(Point::NullaryExpr(2, [&](Eigen::Index) { return u(rng); }));
  const ScalarField phi = [](const Point& x) { return std::exp(3.0 * x(0)) + x.squaredNorm(); };
  const auto V = MetricSpaceView::finite(pts, phi);
  for (auto _ : state) benchmark::DoNotOptimize(zalcman_select(V, pts.front(), 2.0, 0.5));
  state.SetComplexityN(n);
}
BENCHMARK(BM_ZalcmanFinite)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ZalcmanBall(benchmark::State& state) {
  const auto f = *catalog_expression("re_exp");
  const ScalarField phi = [&](const Point& x) { return tilde_derivative(f, x); };
  Point c(2);
  c << 0.0, 0.0;
  const auto V = MetricSpaceView::ball(c, 4.0, phi);
  SelectionBudget budget;
  budget.refinement_levels = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(zalcman_select(V, c, 2.0, 1.0, budget));
}
BENCHMARK(BM_ZalcmanBall)->DenseRange(1, 3)->Unit(benchmark::kMillisecond);

void BM_RenormalizeEntire(benchmark::State& state) {
  const auto f = *catalog_expression("re_z2");
  Point p(2);
  p << 1.0, 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(renormalize_entire(f, p));
}
BENCHMARK(BM_RenormalizeEntire)->Unit(benchmark::kMillisecond);

void BM_ClassifyTube(benchmark::State& state) {
  const auto d = exp_cusp();
  for (auto _ : state) benchmark::DoNotOptimize(classify_tube(d));
}
BENCHMARK(BM_ClassifyTube)->Unit(benchmark::kMillisecond);

void BM_MatrixDf(benchmark::State& state) {
  const auto n = state.range(0);
  CMatrix X = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) X(i, i) = Complex(1.0 + i, 0.5 * i);
  X /= X.norm();
  const auto F = exp_family(CMatrix::Identity(n, n), X, 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_Df(F, Complex(0.3, -0.2)));
}
BENCHMARK(BM_MatrixDf)->Arg(1)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
