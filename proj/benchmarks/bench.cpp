#include "qcr/beltrami.hpp"
#include "qcr/field.hpp"
#include "qcr/fixtures.hpp"
#include "qcr/reparam.hpp"
#include "qcr/seminorm.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace qcr;

static void BM_JohnEllipseQuadratic(benchmark::State& state) {
  const SemiNorm2 s = SemiNorm2::quadratic((Mat2() << 3, 1, 1, 2).finished());
  for (auto _ : state) benchmark::DoNotOptimize(john_ellipse(s));
}
BENCHMARK(BM_JohnEllipseQuadratic);

static void BM_JohnEllipseSampled(benchmark::State& state) {
  const Mat2 a = (Mat2() << 2.0, 0.7, -0.3, 0.5).finished();
  const SemiNorm2 s = SemiNorm2::sample(
      [&](const Vec2& v) {
        const Vec2 w = a * v;
        return std::pow(std::pow(std::abs(w.x()), 3.0) + std::pow(std::abs(w.y()), 3.0), 1.0 / 3.0);
      },
      static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(john_ellipse(s));
}
BENCHMARK(BM_JohnEllipseSampled)->Arg(16)->Arg(64)->Arg(256);

static void BM_EstimateFieldEuclidean(benchmark::State& state) {
  const SampledMap u = fixtures::random_diffeo(static_cast<int>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(estimate_field(u));
}
BENCHMARK(BM_EstimateFieldEuclidean)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EstimateFieldPolygonal(benchmark::State& state) {
  const SampledMap u = fixtures::linf_identity(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_field(u));
}
BENCHMARK(BM_EstimateFieldPolygonal)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SolveBeltrami(benchmark::State& state) {
  const ComplexField mu = fixtures::bump_coefficient({2.0, static_cast<int>(state.range(0))}, 0.2);
  for (auto _ : state) benchmark::DoNotOptimize(solve_beltrami(mu));
}
BENCHMARK(BM_SolveBeltrami)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Invert(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const BeltramiSolution sol = solve_beltrami(fixtures::bump_coefficient({2.0, n}, 0.2));
  const SquareGrid omega = omega_grid_for(sol.map, 4.0 / n);
  for (auto _ : state) benchmark::DoNotOptimize(invert(sol.map, omega));
}
BENCHMARK(BM_Invert)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_EpsilonConformalStretch(benchmark::State& state) {
  const SampledMap u = fixtures::stretch(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(epsilon_conformal(u, 0.2 * kPi));
}
BENCHMARK(BM_EpsilonConformalStretch)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
