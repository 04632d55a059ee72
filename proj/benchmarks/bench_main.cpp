#include <benchmark/benchmark.h>

#include "trsat/generators.hpp"
#include "trsat/graph.hpp"
#include "trsat/model.hpp"
#include "trsat/walksat.hpp"

using namespace trsat;

namespace {

ModelConfig bench_config() {
    ModelConfig cfg;
    cfg.num_encoder_layers = 2;
    cfg.num_decoder_layers = 2;
    cfg.channels = 32;
    cfg.heads = 4;
    cfg.ffn_hidden = 64;
    cfg.init_seed = 1;
    return cfg;
}

void BM_MetaPaths(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CnfFormula f = gen_random_3sat(n, static_cast<int>(4.3 * n), 1);
    SignedBiAdjacency b = build_biadjacency(f);
    for (auto _ : state) benchmark::DoNotOptimize(meta_paths(b));
    state.SetComplexityN(n);
}
BENCHMARK(BM_MetaPaths)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_Forward(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CnfFormula f = gen_random_3sat(n, static_cast<int>(4.3 * n), 1);
    SignedBiAdjacency b = build_biadjacency(f);
    MetaPathSet mp = meta_paths(b);
    TrsatModel m = init_model(bench_config());
    for (auto _ : state) benchmark::DoNotOptimize(forward(m, f, b, mp, uint64_t(7)).outputs.x);
    state.SetComplexityN(n);
}
BENCHMARK(BM_Forward)->RangeMultiplier(2)->Range(32, 512)->Complexity();

void BM_ForwardBackward(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CnfFormula f = gen_random_3sat(n, static_cast<int>(4.3 * n), 1);
    SignedBiAdjacency b = build_biadjacency(f);
    MetaPathSet mp = meta_paths(b);
    TrsatModel m = init_model(bench_config());
    for (auto _ : state) {
        m.zero_grads();
        ForwardResult r = forward(m, f, b, mp, uint64_t(7), true);
        r.tape.backward(r.loss_node);
        benchmark::DoNotOptimize(m.readout_w.grad.data[0]);
    }
    state.SetComplexityN(n);
}
BENCHMARK(BM_ForwardBackward)->RangeMultiplier(2)->Range(32, 256)->Complexity();

void BM_WalkSat(benchmark::State& state) {
    int n = static_cast<int>(state.range(0));
    CnfFormula f = gen_random_3sat(n, static_cast<int>(3.5 * n), 1);
    WalkSatConfig cfg;
    cfg.max_flips = 10000;
    for (auto _ : state) benchmark::DoNotOptimize(walksat(f, cfg).flips);
}
BENCHMARK(BM_WalkSat)->RangeMultiplier(4)->Range(16, 256);

}  // namespace

BENCHMARK_MAIN();
