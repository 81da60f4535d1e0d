#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hgsim/experiment.hpp"

using namespace hgsim;

namespace {

ExperimentConfig small_config(uint64_t seed) {
    ExperimentConfig cfg;
    cfg.synthetic.num_targets = 300;
    cfg.synthetic.feature_dim = 8;
    cfg.synthetic.seed = seed;
    cfg.synthetic.shared_sources = true;
    SyntheticRelationSpec rel;
    rel.fanout = {2.1, 3, 16};
    rel.source_pool_size = 300;
    rel.overlap_rho = 0.6;
    cfg.synthetic.relations.assign(3, rel);
    cfg.model.seed = seed;
    cfg.seed = seed;
    return cfg;
}

}  // namespace

TEST_CASE("speedup against itself is exactly 1") {
    const auto cfg = small_config(3);
    const auto lg = obtain_graph(cfg);
    const auto run = run_single(cfg, lg);
    const auto self = consolidate(run.functional, lg.graph, lg.features, run.sim, cfg.hw.energy,
                                  {"self", "overlap", 3}, &run.sim, "self");
    CHECK(self.speedup == 1.0);

    const auto none = consolidate(run.functional, lg.graph, lg.features, run.sim, cfg.hw.energy,
                                  {"self", "overlap", 3});
    CHECK(none.speedup == 1.0);
    CHECK(none.baseline_name.empty());
}

TEST_CASE("energy breakdown components partition the total") {
    const auto cfg = small_config(5);
    const auto lg = obtain_graph(cfg);
    const auto run = run_single(cfg, lg);
    const auto& e = run.metrics.energy;
    CHECK(e.dram_pj >= 0.0);
    CHECK(e.rpe_pj > 0.0);
    CHECK(e.caches_pj > 0.0);
    const double sum = e.dram_pj + e.rpe_pj + e.caches_pj + e.grouper_pj;
    CHECK(e.total_pj == doctest::Approx(sum).epsilon(1e-9));
}

TEST_CASE("paradigm target-read counts differ by the nonempty-semantic surplus") {
    const auto cfg = small_config(7);
    const auto lg = obtain_graph(cfg);
    const auto sems = build_semantic_graphs(lg.graph, 0);
    const auto params = init_model_params(lg.graph, cfg.model);
    auto store_a = lg.features;
    auto store_b = lg.features;
    const auto order = identity_order(sems.target_count);
    const auto ps = run_per_semantic(lg.graph, sems, store_a, params, cfg.model, order);
    const auto sc = run_semantics_complete(lg.graph, sems, store_b, params, cfg.model, order);

    uint64_t surplus = 0;
    for (uint64_t v = 0; v < sems.target_count; ++v) {
        uint64_t nonempty = 0;
        for (size_t ri = 0; ri < sems.relation_count(); ++ri)
            if (!sems.neighbors[ri].neighbors(static_cast<VertexId>(v)).empty()) ++nonempty;
        surplus += nonempty > 0 ? nonempty - 1 : 0;
    }
    const auto ps_reads = ps.trace.count(AccessRole::Target, Stage::NeighborAggregation);
    const auto sc_reads = sc.trace.count(AccessRole::Target, Stage::NeighborAggregation);
    // every vertex here has at least one nonempty semantic
    CHECK(ps_reads - sc_reads == surplus);
}

TEST_CASE("cross-check passes on a consistent run and pinpoints truncation") {
    const auto cfg = small_config(11);
    const auto lg = obtain_graph(cfg);
    const auto run = run_single(cfg, lg);

    auto ok = cross_check(run.functional.trace, run.sim.mem);
    CHECK(ok.pass);

    auto truncated = run.functional.trace;
    truncated.reads.pop_back();
    const auto bad = cross_check(truncated, run.sim.mem);
    CHECK_FALSE(bad.pass);
    CHECK(bad.detail.find(std::to_string(truncated.total_reads())) != std::string::npos);
}

TEST_CASE("mismatched fingerprints refuse to consolidate") {
    const auto cfg_a = small_config(1);
    const auto lg_a = obtain_graph(cfg_a);
    const auto run_a = run_single(cfg_a, lg_a);

    auto cfg_b = small_config(2);
    const auto lg_b = obtain_graph(cfg_b);
    const auto run_b = run_single(cfg_b, lg_b);

    CHECK_THROWS_AS(consolidate(run_a.functional, lg_b.graph, lg_b.features, run_b.sim,
                                cfg_b.hw.energy, {"x", "overlap", 2}),
                    ValidationError);
}

TEST_CASE("metrics serialize to json and csv") {
    const auto cfg = small_config(13);
    const auto lg = obtain_graph(cfg);
    const auto run = run_single(cfg, lg);
    const auto j = run.metrics.to_json();
    CHECK(j["expansion_ratio"].get<double>() >= 1.0);
    CHECK(j["redundancy_fraction"].get<double>() >= 0.0);
    CHECK(j["redundancy_fraction"].get<double>() < 1.0);
    const auto row = run.metrics.csv_row();
    const auto header = MetricsBundle::csv_header();
    CHECK(std::count(row.begin(), row.end(), ',') ==
          std::count(header.begin(), header.end(), ','));
}
