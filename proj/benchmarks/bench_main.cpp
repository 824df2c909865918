#include <benchmark/benchmark.h>

#include "maxlab/corpus.hpp"
#include "maxlab/kernels.hpp"
#include "maxlab/maxops.hpp"
#include "maxlab/sunrise.hpp"

using namespace maxlab;

namespace {

OperatorSpec op_of(OperatorKind k, double alpha = 0) {
  OperatorSpec op;
  op.kind = k;
  op.alpha = alpha;
  return op;
}

const Profile& line_profile() {
  static const Profile f = random_corpus(Domain::line(), 1, 11)[0];
  return f;
}

const Profile& radial_profile(int d) {
  static const Profile f2 = random_corpus(Domain::radial(2), 1, 12)[0];
  static const Profile f3 = random_corpus(Domain::radial(3), 1, 13)[0];
  return d == 2 ? f2 : f3;
}

void BM_IntervalAverage(benchmark::State& state) {
  const Profile& f = line_profile();
  double a = -1.3;
  for (auto _ : state) {
    benchmark::DoNotOptimize(interval_average(f, a, 0.7));
    a += 1e-9;
  }
}
BENCHMARK(BM_IntervalAverage);

void BM_BallAverageRadial(benchmark::State& state) {
  const Profile& f = radial_profile(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(ball_average_radial(f, 1.1, 0.6));
}
BENCHMARK(BM_BallAverageRadial)->Arg(2)->Arg(3);

void BM_SquareAverage(benchmark::State& state) {
  const Profile& f = radial_profile(2);
  const CubeSpec q{2, 0.8, 0.3, 0.5, 0.4};
  for (auto _ : state) benchmark::DoNotOptimize(cube_average(f, q));
}
BENCHMARK(BM_SquareAverage);

void BM_HeatLine(benchmark::State& state) {
  const Profile& f = line_profile();
  for (auto _ : state)
    benchmark::DoNotOptimize(angular_kernel_average(f, KernelKind::kHeat, {0.4, 0.3}));
}
BENCHMARK(BM_HeatLine);

void BM_HeatPlane(benchmark::State& state) {
  const Profile& f = radial_profile(2);
  for (auto _ : state)
    benchmark::DoNotOptimize(angular_kernel_average(f, KernelKind::kHeat, {0.9, 0.3}));
}
BENCHMARK(BM_HeatPlane);

void BM_MaximizeAt(benchmark::State& state) {
  const auto kind = static_cast<OperatorKind>(state.range(0));
  const double alpha = kind == OperatorKind::kUncenteredHL || kind == OperatorKind::kCenteredHL ? 0 : 0.5;
  const OperatorSpec op = op_of(kind, alpha);
  const Profile& f = line_profile();
  for (auto _ : state) benchmark::DoNotOptimize(maximize_at(op, f, 0.37).value);
}
BENCHMARK(BM_MaximizeAt)
    ->Arg(static_cast<int>(OperatorKind::kUncenteredHL))
    ->Arg(static_cast<int>(OperatorKind::kCenteredHL))
    ->Arg(static_cast<int>(OperatorKind::kNonTangentialCube))
    ->Arg(static_cast<int>(OperatorKind::kHeatFlow))
    ->Arg(static_cast<int>(OperatorKind::kPoissonFlow))
    ->Unit(benchmark::kMicrosecond);

void BM_EvaluateLine(benchmark::State& state) {
  const Profile& f = line_profile();
  const auto grid = make_grid(f, static_cast<int>(state.range(0)));
  const OperatorSpec op;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(op, f, grid, 1).values.data());
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}
BENCHMARK(BM_EvaluateLine)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_EvaluateRadial(benchmark::State& state) {
  const Profile& f = radial_profile(2);
  const auto grid = make_grid(f, 32);
  const OperatorSpec op;
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(op, f, grid, 1).values.data());
}
BENCHMARK(BM_EvaluateRadial)->Unit(benchmark::kMillisecond);

void BM_Sunrise(benchmark::State& state) {
  const Profile& f = line_profile();
  const OperatorSpec op;
  const auto field = evaluate(op, f, make_grid(f, 256), 1);
  for (auto _ : state) {
    const auto dec = sunrise_decompose(f, field, 0.05);
    benchmark::DoNotOptimize(lateral_derivative_table(dec).cells_checked);
  }
}
BENCHMARK(BM_Sunrise)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
