#include <benchmark/benchmark.h>

#include "curveflow/experiment.hpp"
#include "curveflow/flows.hpp"
#include "curveflow/fullydiscrete.hpp"
#include "curveflow/semidiscrete.hpp"

namespace {

using namespace curveflow;

void BM_EdgeFrame(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(edge_frame(curve));
}
BENCHMARK(BM_EdgeFrame)->Arg(50)->Arg(200)->Arg(800);

void BM_MidpointFrame(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    const Points X = curve.vertices();
    const Points Y = X * 1.001;
    for (auto _ : state) benchmark::DoNotOptimize(midpoint_frame(Y, X));
}
BENCHMARK(BM_MidpointFrame)->Arg(50)->Arg(200)->Arg(800);

void BM_MfsSolve(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    const EdgeFrame edges = edge_frame(curve);
    for (auto _ : state) benchmark::DoNotOptimize(solve_mfs(curve, edges.kappa, {}));
}
BENCHMARK(BM_MfsSolve)->Arg(50)->Arg(100)->Arg(200);

void BM_ResidualMcf(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    const Points X = curve.vertices();
    const Points Y = X * 1.0001;
    const FlowModel model = Mcf{};
    for (auto _ : state) benchmark::DoNotOptimize(residual(Y, X, 1e-4, model, 1e3));
}
BENCHMARK(BM_ResidualMcf)->Arg(50)->Arg(200);

void BM_ResidualHeleShaw(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    const Points X = curve.vertices();
    const Points Y = X * 1.0001;
    const FlowModel model = HeleShaw{1.0, {}};
    for (auto _ : state) benchmark::DoNotOptimize(residual(Y, X, 1e-4, model, 1e3));
}
BENCHMARK(BM_ResidualHeleShaw)->Arg(50)->Arg(100);

void BM_NewtonStepMcf(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    const FlowModel model = Mcf{};
    for (auto _ : state)
        benchmark::DoNotOptimize(newton_step_solve(curve.vertices(), 1e-4, model, 1e3));
}
BENCHMARK(BM_NewtonStepMcf)->Arg(50);

void BM_Rk4Step(benchmark::State& state) {
    const PolygonalCurve curve = initial_curve(static_cast<int>(state.range(0)));
    const FlowModel model = Mcf{};
    for (auto _ : state) benchmark::DoNotOptimize(rk4_step(curve, model, 1e3, 1e-6));
}
BENCHMARK(BM_Rk4Step)->Arg(50)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
