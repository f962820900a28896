#include <benchmark/benchmark.h>

#include "ccembed/ccsolver.hpp"
#include "ccembed/kernelmath.hpp"
#include "ccembed/random.hpp"
#include "ccembed/sysmodels.hpp"

namespace {

using namespace ccembed;

PointSet random_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  Stream rng(seed);
  PointSet p(n, d);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = rng.uniform();
  return p;
}

void BM_GramProduct(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  const PointSet x = random_points(m, 4, 1), u = random_points(m, 30, 2);
  const KernelSpec kx = KernelSpec::fixed(0.5), ku = KernelSpec::fixed(1e-3);
  for (auto _ : state) benchmark::DoNotOptimize(gram_product(x, u, kx, ku));
}
BENCHMARK(BM_GramProduct)->Arg(250)->Arg(500)->Arg(1000)->Arg(2500)->Unit(benchmark::kMillisecond);

void BM_SpdFactor(benchmark::State& state) {
  const auto m = static_cast<Eigen::Index>(state.range(0));
  Matrix g = gram_product(random_points(m, 4, 1), random_points(m, 30, 2), KernelSpec::fixed(0.5),
                          KernelSpec::fixed(1e-3));
  g.diagonal().array() += 1e-7 * static_cast<double>(m);
  for (auto _ : state) benchmark::DoNotOptimize(spd_factor(g));
}
BENCHMARK(BM_SpdFactor)->Arg(250)->Arg(500)->Arg(1000)->Arg(2500)->Unit(benchmark::kMillisecond);

void BM_SolveLp(benchmark::State& state) {
  const auto p = static_cast<Eigen::Index>(state.range(0));
  Stream rng(3);
  LPInstance inst;
  inst.cost_row.resize(p);
  inst.safety_row.resize(p);
  for (Eigen::Index j = 0; j < p; ++j) {
    inst.cost_row(j) = rng.uniform(0, 100);
    inst.safety_row(j) = rng.uniform(-0.2, 1.2);
  }
  inst.threshold = 0.9;
  inst.diagnostics = safety_diagnostics(inst.safety_row);
  for (auto _ : state) benchmark::DoNotOptimize(solve_lp(inst));
}
BENCHMARK(BM_SolveLp)->RangeMultiplier(4)->Range(64, 4096)->Unit(benchmark::kMicrosecond);

void BM_Rollout(benchmark::State& state) {
  const QuadrotorModel model(0.1, ParamPrior{}, DisturbanceSpec::quadrotor_default());
  ControlSequence u;
  u.inputs = StepMatrix::Constant(15, 2, 0.5);
  const Vector x0 = Vector::Zero(4);
  Stream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(rollout(model, x0, u, rng));
}
BENCHMARK(BM_Rollout);

}  // namespace

BENCHMARK_MAIN();
