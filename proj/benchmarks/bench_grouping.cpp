#include <benchmark/benchmark.h>

#include "hgsim/grouping.hpp"
#include "hgsim/synthetic.hpp"

namespace {

using namespace hgsim;

LoadedGraph make_graph(uint64_t targets) {
    SyntheticSpec spec;
    spec.num_targets = targets;
    spec.feature_dim = 16;
    spec.seed = 42;
    spec.shared_sources = true;
    SyntheticRelationSpec rel;
    rel.fanout = {2.1, 8, 64};
    rel.source_pool_size = static_cast<uint32_t>(targets + targets / 2);
    rel.overlap_rho = 0.6;
    spec.relations.assign(3, rel);
    return generate_synthetic(spec);
}

void BM_BuildHypergraph(benchmark::State& state) {
    const auto lg = make_graph(static_cast<uint64_t>(state.range(0)));
    const auto sems = build_semantic_graphs(lg.graph, 0);
    for (auto _ : state) {
        auto h = build_hypergraph(sems, 0.15);
        benchmark::DoNotOptimize(h.total_weight);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_BuildHypergraph)->RangeMultiplier(2)->Range(1000, 8000)->Complexity();

void BM_GroupOverlapDriven(benchmark::State& state) {
    const auto lg = make_graph(static_cast<uint64_t>(state.range(0)));
    const auto sems = build_semantic_graphs(lg.graph, 0);
    const auto h = build_hypergraph(sems, 0.15);
    for (auto _ : state) {
        auto plan = group_overlap_driven(h, sems.target_count, 4, 1);
        benchmark::DoNotOptimize(plan.groups.size());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GroupOverlapDriven)->RangeMultiplier(2)->Range(1000, 8000)->Complexity();

void BM_GroupRandom(benchmark::State& state) {
    for (auto _ : state) {
        auto plan = group_random(static_cast<uint64_t>(state.range(0)), 4, 1);
        benchmark::DoNotOptimize(plan.groups.size());
    }
}
BENCHMARK(BM_GroupRandom)->Arg(8000);

}  // namespace
