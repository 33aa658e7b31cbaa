#include <benchmark/benchmark.h>

#include "distvar/degrade.hpp"
#include "distvar/regularize.hpp"
#include "distvar/resample.hpp"
#include "distvar/rng.hpp"
#include "distvar/solver.hpp"
#include "distvar/synthetic.hpp"

using namespace distvar;

namespace {

AtmosphereParams bench_atm() {
    AtmosphereParams atm;
    atm.r0 = 4.0;
    atm.beta0 = 0.05;
    return atm;
}

struct Problem {
    SyntheticScene scene;
    DegradationModel model;
    ScalarField lr;

    explicit Problem(int n) : scene(make_two_plane_scene(1, n, n)) {
        model = build_model(bench_atm(), scene.depth, 6, 2);
        lr = apply(model, scene.hr, scene.depth);
    }
};

void BM_Apply(benchmark::State& state) {
    Problem p(int(state.range(0)));
    for (auto _ : state) {
        ScalarField out = apply(p.model, p.scene.hr, p.scene.depth);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Apply)->Arg(64)->Arg(128)->Arg(256)->Complexity();

void BM_ApplyAdjoint(benchmark::State& state) {
    Problem p(int(state.range(0)));
    for (auto _ : state) {
        ScalarField out = apply_adjoint(p.model, p.lr, p.scene.depth);
        benchmark::DoNotOptimize(out.data.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ApplyAdjoint)->Arg(64)->Arg(128)->Arg(256)->Complexity();

void BM_RegularizerGradient(benchmark::State& state) {
    Problem p(int(state.range(0)));
    RegularizerParams params;
    for (auto _ : state) {
        ScalarField g = regularizer_gradient(p.scene.hr, p.scene.depth, params);
        benchmark::DoNotOptimize(g.data.data());
    }
}
BENCHMARK(BM_RegularizerGradient)->Arg(64)->Arg(128)->Arg(256);

void BM_FlowStep(benchmark::State& state) {
    Problem p(int(state.range(0)));
    RegularizerParams params;
    SolverConfig config;
    for (auto _ : state) {
        SolverState s;
        s.u = upsample_bilinear(p.lr, 2);
        s.tau = config.tau0;
        s.current = energy(s.u, p.lr, p.model, p.scene.depth, params);
        SolverTrace trace;
        flow_step(s, p.lr, p.model, p.scene.depth, p.scene.depth, params, config, nullptr,
                  trace);
        benchmark::DoNotOptimize(s.u.data.data());
    }
}
BENCHMARK(BM_FlowStep)->Arg(64)->Arg(128);

}  // namespace

BENCHMARK_MAIN();
