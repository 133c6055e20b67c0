// OpenMP kernels against their serial references. Thread count follows ANDO_LAB_THREADS.
#include <benchmark/benchmark.h>

#include "ando/bounds.hpp"
#include "ando/polynomial.hpp"
#include "generators.hpp"

namespace {

ando::BivariatePolyMatrix sample_poly() {
    gen::Rng rng(7);
    return gen::bivariate(rng, 6, 2);
}

void torus_parallel(benchmark::State& state) {
    const auto p = sample_poly();
    for (auto _ : state) benchmark::DoNotOptimize(ando::torus_sup_norm(p, static_cast<int>(state.range(0))));
}

void torus_serial(benchmark::State& state) {
    const auto p = sample_poly();
    for (auto _ : state) benchmark::DoNotOptimize(ando::torus_sup_norm_serial(p, static_cast<int>(state.range(0))));
}

void extensions(benchmark::State& state, bool parallel) {
    gen::Rng rng(11);
    const auto pair = gen::commuting_pair(rng, 5);
    const auto p = gen::bivariate(rng, 5, 2);
    for (auto _ : state) {
        const ando::Am3Engine engine(pair, static_cast<int>(state.range(0)), 0, {}, parallel);
        benchmark::DoNotOptimize(engine.evaluate(p).value);
    }
}

void extensions_parallel(benchmark::State& state) { extensions(state, true); }
void extensions_serial(benchmark::State& state) { extensions(state, false); }

}  // namespace

BENCHMARK(torus_parallel)->Arg(512)->Arg(2048);
BENCHMARK(torus_serial)->Arg(512)->Arg(2048);
BENCHMARK(extensions_parallel)->Arg(16)->Arg(64);
BENCHMARK(extensions_serial)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
