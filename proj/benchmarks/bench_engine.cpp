#include <benchmark/benchmark.h>

#include "hgsim/accel_sim.hpp"
#include "hgsim/synthetic.hpp"

namespace {

using namespace hgsim;

struct Fixture {
    LoadedGraph lg;
    SemanticGraphSet sems;
    ModelConfig mcfg;
    ModelParams params;

    explicit Fixture(uint64_t targets, ModelVariant variant) {
        SyntheticSpec spec;
        spec.num_targets = targets;
        spec.feature_dim = 16;
        spec.seed = 7;
        spec.shared_sources = true;
        SyntheticRelationSpec rel;
        rel.fanout = {2.1, 8, 32};
        rel.source_pool_size = static_cast<uint32_t>(targets);
        rel.overlap_rho = 0.6;
        spec.relations.assign(3, rel);
        lg = generate_synthetic(spec);
        sems = build_semantic_graphs(lg.graph, 0);
        mcfg.variant = variant;
        mcfg.d_hid = 64;
        mcfg.d_out = 64;
        params = init_model_params(lg.graph, mcfg);
    }
};

void BM_ReferenceSemanticsComplete(benchmark::State& state) {
    Fixture f(static_cast<uint64_t>(state.range(0)), ModelVariant::RgcnLike);
    const auto order = identity_order(f.sems.target_count);
    for (auto _ : state) {
        FeatureStore store = f.lg.features;
        auto res = run_semantics_complete(f.lg.graph, f.sems, store, f.params, f.mcfg, order);
        benchmark::DoNotOptimize(res.embeddings.data.data());
    }
}
BENCHMARK(BM_ReferenceSemanticsComplete)->Arg(1000)->Arg(4000);

void BM_SimulateSemanticsComplete(benchmark::State& state) {
    Fixture f(static_cast<uint64_t>(state.range(0)), ModelVariant::RgcnLike);
    const auto plan = group_sequential(f.sems.target_count, 4);
    HwConfig hw;
    for (auto _ : state) {
        auto report = simulate_run(f.lg.graph, f.sems, f.params, f.mcfg, f.lg.features, plan,
                                   Paradigm::SemanticsComplete, hw);
        benchmark::DoNotOptimize(report.total_cycles);
    }
}
BENCHMARK(BM_SimulateSemanticsComplete)->Arg(1000)->Arg(4000);

void BM_SimulateRgat(benchmark::State& state) {
    Fixture f(static_cast<uint64_t>(state.range(0)), ModelVariant::RgatLike);
    const auto plan = group_sequential(f.sems.target_count, 4);
    HwConfig hw;
    for (auto _ : state) {
        auto report = simulate_run(f.lg.graph, f.sems, f.params, f.mcfg, f.lg.features, plan,
                                   Paradigm::SemanticsComplete, hw);
        benchmark::DoNotOptimize(report.total_cycles);
    }
}
BENCHMARK(BM_SimulateRgat)->Arg(1000);

}  // namespace
