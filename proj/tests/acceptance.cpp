// Acceptance suite: one scenario per criterion, one PASS/FAIL line each.
// Scaled-down directional checks stand in for full-scale absolute numbers;
// every tolerance is pinned here.

#include <cstdio>
#include <cstdlib>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "hgsim/experiment.hpp"

using namespace hgsim;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void verdict(int criterion, const char* name, bool ok, const std::string& detail) {
    std::printf("%s  criterion %d (%s): %s\n", ok ? "PASS" : "FAIL", criterion, name,
                detail.c_str());
    if (!ok) ++g_failures;
}

LoadedGraph random_graph(Rng& rng, uint64_t max_targets, size_t max_relations) {
    SyntheticSpec spec;
    spec.num_targets = 20 + rng.uniform_index(max_targets - 19);
    spec.feature_dim = 8;
    spec.seed = rng.next_u64();
    spec.shared_sources = rng.uniform01() < 0.5;
    SyntheticRelationSpec rel;
    rel.fanout = {2.0 + rng.uniform01(), 1, 12};
    rel.source_pool_size =
        static_cast<uint32_t>(std::max<uint64_t>(spec.num_targets / 2, 16));
    rel.overlap_rho = rng.uniform01();
    spec.relations.assign(1 + rng.uniform_index(max_relations), rel);
    return generate_synthetic(spec);
}

// ---- criteria 1 and 2: paradigm equivalence and memory expansion ----------

void check_equivalence_and_expansion() {
    bool equal_everywhere = true;
    bool ordering_everywhere = true;
    size_t graphs = 0;
    Rng rng(20240601);
    for (int i = 0; i < 100; ++i) {
        const auto lg = random_graph(rng, 1000, 4);
        const auto sems = build_semantic_graphs(lg.graph, 0);
        ModelConfig cfg;
        cfg.variant = i % 2 == 0 ? ModelVariant::RgcnLike : ModelVariant::RgatLike;
        cfg.d_hid = 16;
        cfg.d_out = 16;
        cfg.seed = rng.next_u64();
        if (cfg.variant == ModelVariant::RgatLike) cfg.activation = Activation::LeakyRelu;
        const auto params = init_model_params(lg.graph, cfg);
        auto store_a = lg.features;
        auto store_b = lg.features;
        const auto ps = run_per_semantic(lg.graph, sems, store_a, params, cfg);
        const auto sc = run_semantics_complete(lg.graph, sems, store_b, params, cfg,
                                               identity_order(sems.target_count));
        ++graphs;
        // identical per-(vertex, relation) summation order: bitwise equality
        if (!(ps.embeddings == sc.embeddings)) equal_everywhere = false;
        if (expansion_ratio(sc.ledger, lg.graph, lg.features) >
            expansion_ratio(ps.ledger, lg.graph, lg.features))
            ordering_everywhere = false;
    }
    verdict(1, "paradigm equivalence", equal_everywhere && graphs == 100,
            "bitwise-equal embeddings on " + std::to_string(graphs) +
                " randomized graphs, rgcn-like and rgat-like");

    // AM-like profile: many semantics, d_hid 64, 10^4 targets.
    SyntheticSpec spec;
    spec.num_targets = 10000;
    spec.feature_dim = 32;
    spec.seed = 77;
    SyntheticRelationSpec rel;
    rel.fanout = {2.1, 2, 8};
    rel.source_pool_size = 600;
    rel.overlap_rho = 0.5;
    spec.relations.assign(16, rel);
    const auto lg = generate_synthetic(spec);
    const auto sems = build_semantic_graphs(lg.graph, 0);
    ModelConfig cfg;
    cfg.d_hid = 64;
    cfg.d_out = 64;
    const auto params = init_model_params(lg.graph, cfg);
    auto store_a = lg.features;
    auto store_b = lg.features;
    const auto ps = run_per_semantic(lg.graph, sems, store_a, params, cfg);
    const auto sc = run_semantics_complete(lg.graph, sems, store_b, params, cfg,
                                           identity_order(sems.target_count));
    const double rp = expansion_ratio(ps.ledger, lg.graph, lg.features);
    const double rs = expansion_ratio(sc.ledger, lg.graph, lg.features);
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << "per-semantic " << rp << " vs semantics-complete " << rs << " (ratio "
       << rp / rs << ", need >= 3), ordering held on all graphs";
    verdict(2, "memory expansion", rp / rs >= 3.0 && rs <= rp && ordering_everywhere, os.str());
}

// ---- criterion 3: redundancy metric ----------------------------------------

void check_redundancy() {
    bool exact = true;
    Rng rng(555);
    for (int trial = 0; trial < 1000; ++trial) {
        AccessTrace t;
        const uint64_t vertices = 1 + rng.uniform_index(40);
        const uint64_t reads = 1 + rng.uniform_index(300);
        for (uint64_t i = 0; i < reads; ++i)
            t.log({static_cast<VertexTypeId>(rng.uniform_index(3)),
                   static_cast<VertexId>(rng.uniform_index(vertices))},
                  AccessRole::Neighbor, 0, Stage::NeighborAggregation);
        std::set<std::pair<uint32_t, uint32_t>> distinct;
        for (const auto& r : t.reads) distinct.insert({r.vertex.type, r.vertex.id});
        const double expected =
            (static_cast<double>(reads) - static_cast<double>(distinct.size())) /
            static_cast<double>(reads);
        if (redundancy_fraction(t) != expected) exact = false;
    }

    SyntheticSpec spec;
    spec.num_targets = 2000;
    spec.feature_dim = 8;
    spec.seed = 31;
    spec.shared_sources = true;
    SyntheticRelationSpec rel;
    rel.fanout = {2.1, 20, 60};
    rel.source_pool_size = 1000;
    rel.overlap_rho = 0.5;
    spec.relations.assign(3, rel);
    const auto lg = generate_synthetic(spec);
    const double edge_ratio = static_cast<double>(lg.graph.total_edges()) /
                              static_cast<double>(lg.graph.total_vertices());
    const auto sems = build_semantic_graphs(lg.graph, 0);
    ModelConfig cfg;
    cfg.d_hid = 16;
    cfg.d_out = 16;
    const auto params = init_model_params(lg.graph, cfg);
    auto store = lg.features;
    const auto sc = run_semantics_complete(lg.graph, sems, store, params, cfg,
                                           identity_order(sems.target_count));
    const double fraction = redundancy_fraction(sc.trace);
    std::ostringstream os;
    os.precision(3);
    os << std::fixed << "1000/1000 traces exact; power-law run (edge/vertex " << edge_ratio
       << ") fraction " << fraction << " (need > 0.6)";
    verdict(3, "redundancy metric", exact && edge_ratio >= 20.0 && fraction > 0.6, os.str());
}

// ---- criterion 4: grouping correctness -------------------------------------

OverlapHypergraph make_hypergraph(uint32_t n, const std::vector<OverlapHypergraph::Edge>& edges) {
    OverlapHypergraph h;
    for (uint32_t i = 0; i < n; ++i) {
        SuperVertex sv;
        sv.target = i;
        sv.neighborhood = {{0, i}};
        h.supers.push_back(std::move(sv));
    }
    h.edges = edges;
    h.adjacency.resize(n);
    h.degree.assign(n, 0.0);
    for (const auto& e : h.edges) {
        h.adjacency[e.a].push_back({e.b, e.weight});
        h.adjacency[e.b].push_back({e.a, e.weight});
        h.degree[e.a] += e.weight;
        h.degree[e.b] += e.weight;
        h.total_weight += e.weight;
    }
    return h;
}

double modularity_of(const OverlapHypergraph& h, const std::vector<uint32_t>& community_of) {
    const double m = h.total_weight;
    if (m == 0.0) return 0.0;
    const auto n = static_cast<uint32_t>(h.supers.size());
    std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
    for (const auto& e : h.edges) a[e.a][e.b] = a[e.b][e.a] = e.weight;
    double q = 0.0;
    for (uint32_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < n; ++j)
            if (community_of[i] == community_of[j])
                q += a[i][j] - h.degree[i] * h.degree[j] / (2.0 * m);
    return q / (2.0 * m);
}

void check_grouping() {
    bool gain_ok = true;
    Rng rng(99901);
    for (int trial = 0; trial < 1000; ++trial) {
        const uint32_t n = 3 + static_cast<uint32_t>(rng.uniform_index(48));
        std::vector<OverlapHypergraph::Edge> edges;
        for (uint32_t i = 0; i < n; ++i)
            for (uint32_t j = i + 1; j < n; ++j)
                if (rng.uniform01() < 0.3) edges.push_back({i, j, rng.uniform(0.01, 1.0)});
        const auto h = make_hypergraph(n, edges);
        const auto v = static_cast<uint32_t>(rng.uniform_index(n));
        std::vector<uint32_t> community;
        for (uint32_t u = 0; u < n; ++u)
            if (u != v && rng.uniform01() < 0.3) community.push_back(u);
        if (community.empty()) community.push_back(v == 0 ? 1 : 0);

        std::vector<uint32_t> before(n), after;
        for (uint32_t i = 0; i < n; ++i) before[i] = i + 1;
        for (uint32_t u : community) before[u] = 0;
        after = before;
        after[v] = 0;
        const double want = modularity_of(h, after) - modularity_of(h, before);
        if (std::abs(modularity_gain(h, v, community) - want) > 1e-9) gain_ok = false;
    }

    // planted two-clique structure
    std::vector<OverlapHypergraph::Edge> edges;
    for (uint32_t base : {0u, 4u})
        for (uint32_t i = base; i < base + 4; ++i)
            for (uint32_t j = i + 1; j < base + 4; ++j) edges.push_back({i, j, 1.0});
    edges.push_back({3, 4, 0.01});
    const auto cliques = make_hypergraph(8, edges);
    bool planted_ok = true;
    for (uint64_t seed : {1ull, 2ull, 3ull}) {
        const auto plan = group_overlap_driven(cliques, 8, 1, seed);
        std::set<std::set<VertexId>> groups;
        for (const auto& g : plan.groups) groups.insert({g.members.begin(), g.members.end()});
        if (groups != std::set<std::set<VertexId>>{{0, 1, 2, 3}, {4, 5, 6, 7}})
            planted_ok = false;
    }

    // every plan is a partition under the cap formula
    bool plans_ok = true;
    Rng prng(4242);
    for (int trial = 0; trial < 30; ++trial) {
        const uint64_t targets = 1 + prng.uniform_index(700);
        const uint32_t channels = 1 + static_cast<uint32_t>(prng.uniform_index(8));
        const auto lg = random_graph(prng, 200, 3);
        const auto sems = build_semantic_graphs(lg.graph, 0);
        const auto h = build_hypergraph(sems, 0.15);
        try {
            for (const auto& plan :
                 {group_overlap_driven(h, sems.target_count, channels, trial),
                  group_random(targets, channels, trial), group_sequential(targets, channels)}) {
                plan.validate();
                if (plan.n_max != ceil_div(plan.n_targets, channels)) plans_ok = false;
            }
        } catch (const std::exception&) {
            plans_ok = false;
        }
    }

    verdict(4, "grouping correctness", gain_ok && planted_ok && plans_ok,
            std::string("gain oracle 1000/1000 within 1e-9; cliques ") +
                (planted_ok ? "recovered" : "missed") + "; plans respect the cap");
}

// ---- criterion 5: DRAM ablation ladder -------------------------------------

void check_dram_ladder(std::vector<const SimReport*>& all_reports,
                       std::vector<AblationResult>& keep_alive) {
    int directional = 0;
    int o_hits = 0, s_hits = 0;
    std::ostringstream os;
    os.precision(1);
    os << std::fixed;
    for (uint64_t seed = 1; seed <= 5; ++seed) {
        ExperimentConfig cfg;
        cfg.synthetic.num_targets = 20000;
        cfg.synthetic.feature_dim = 16;
        cfg.synthetic.seed = seed;
        cfg.synthetic.shared_sources = true;
        SyntheticRelationSpec rel;
        rel.fanout = {2.1, 8, 64};
        rel.source_pool_size = 30000;
        rel.overlap_rho = 0.6;
        cfg.synthetic.relations.assign(3, rel);
        cfg.model.seed = seed;
        cfg.seed = seed;
        const auto lg = obtain_graph(cfg);
        keep_alive.push_back(run_ablation(cfg, lg));
        const auto& runs = keep_alive.back().runs;
        const uint64_t b = runs[0].sim.mem.feature_dram_bytes();
        const uint64_t s = runs[1].sim.mem.feature_dram_bytes();
        const uint64_t p = runs[2].sim.mem.feature_dram_bytes();
        const uint64_t o = runs[3].sim.mem.feature_dram_bytes();
        for (const auto& r : runs) all_reports.push_back(&r.sim);

        if (s <= b && o <= p && runs[2].sim.total_cycles < runs[1].sim.total_cycles)
            ++directional;
        const double s_cut = 1.0 - static_cast<double>(s) / static_cast<double>(b);
        const double o_cut = 1.0 - static_cast<double>(o) / static_cast<double>(p);
        if (s_cut >= 0.05) ++s_hits;
        if (o_cut >= 0.40) ++o_hits;
        os << " seed" << seed << "[S" << 100 * s_cut << "% O" << 100 * o_cut << "%]";
    }
    const bool ok = directional == 5 && s_hits >= 3 && o_hits >= 3;
    verdict(5, "DRAM ablation ladder", ok,
            "direction " + std::to_string(directional) + "/5, -S cut >= 5% on " +
                std::to_string(s_hits) + "/5, -O cut >= 40% on " + std::to_string(o_hits) +
                "/5;" + os.str());
}

// ---- criterion 6: cycle-model consistency ----------------------------------

void check_cycle_model() {
    bool ok = true;
    Rng rng(60601);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<uint32_t>(1 + rng.uniform_index(60));
        const uint32_t d_in = 8u << rng.uniform_index(2);
        const uint32_t d_hid = 1u + static_cast<uint32_t>(rng.uniform_index(64));
        HwConfig hw;
        hw.rpe.first_layer_units = 1u << (1 + rng.uniform_index(3));  // L in {2,4,8}
        hw.channels.n_channels = 1;
        hw.unit_trace = true;

        HetGraph g;
        g.vertex_types = {{"T", 1, d_in}, {"S", n, d_in}};
        g.target_type = 0;
        g.relations = {{"R0", 1, 0}};
        RelationAdjacency adj;
        adj.offsets = {0, n};
        for (VertexId u = 0; u < n; ++u) adj.sources.push_back(u);
        g.adjacency = {std::move(adj)};
        FeatureStore store;
        store.raw.emplace_back(1, d_in);
        store.raw.emplace_back(n, d_in);

        const auto sems = build_semantic_graphs(g, 0);
        ModelConfig mcfg;
        mcfg.d_hid = d_hid;
        mcfg.d_out = d_hid;
        const auto params = init_model_params(g, mcfg);
        const auto plan = group_sequential(1, 1);
        const auto r =
            simulate_run(g, sems, params, mcfg, store, plan, Paradigm::SemanticsComplete, hw);

        uint64_t na = 0, sf = 0, fp = 0;
        for (const auto& e : r.unit_trace) {
            if (e.kind == "na-agg") na = e.end - e.start;
            if (e.kind == "sf-agg") sf = e.end - e.start;
            if (e.kind == "fp-linear" && fp == 0) fp = e.end - e.start;
        }
        if (na != rpe_aggregation_cycles(n + 1, d_hid, hw.rpe)) ok = false;
        if (sf != rpe_aggregation_cycles(1, d_hid, hw.rpe)) ok = false;
        if (fp != rpe_linear_cycles(d_in, d_hid, hw.rpe)) ok = false;
    }
    // the odd-vector case from the worked microarchitecture example
    const bool odd_case = rpe_aggregation_cycles(5, 1, RpeConfig{2}) == 7;
    verdict(6, "cycle-model consistency", ok && odd_case,
            std::string("unit traces equal closed forms on 100 workloads; n=5,L=2,d=1 -> ") +
                std::to_string(rpe_aggregation_cycles(5, 1, RpeConfig{2})) + " cycles");
}

// ---- criterion 7: memory model exactness ------------------------------------

class RefFifo {
public:
    explicit RefFifo(uint64_t capacity_lines) : cap_(capacity_lines) {}
    bool access(const CacheKey& key, uint32_t lines) {
        for (const auto& e : q_)
            if (e.first == key) return true;
        if (lines > cap_) return false;
        while (used_ + lines > cap_) {
            used_ -= q_.front().second;
            q_.pop_front();
        }
        q_.push_back({key, lines});
        used_ += lines;
        return false;
    }

private:
    uint64_t cap_;
    uint64_t used_ = 0;
    std::deque<std::pair<CacheKey, uint32_t>> q_;
};

void check_memory_model(const std::vector<const SimReport*>& all_reports) {
    CacheConfig cache;
    cache.global_bytes = 256 * 64;
    cache.local_bytes = 0;  // single level against the single-queue reference
    MemorySystem ms(cache, HbmConfig{}, BufferConfig{}, 1);
    RefFifo ref(256);
    Rng rng(70707);
    bool sequence_ok = true;
    for (int i = 0; i < 100000; ++i) {
        const CacheKey k{static_cast<VertexTypeId>(rng.uniform_index(2)),
                         static_cast<VertexId>(rng.uniform_index(600)),
                         static_cast<uint32_t>(rng.uniform_index(2))};
        const uint32_t bytes = (k.stage + 1) * 64;
        const bool want_hit = ref.access(k, bytes / 64);
        const bool got_hit =
            ms.access(k, bytes, MemRole::ProjectedFeature, 0, i).level != HitLevel::Dram;
        if (want_hit != got_hit) {
            sequence_ok = false;
            break;
        }
    }
    const auto counters = ms.drain_and_report(200000);

    bool energy_ok =
        counters.dram_energy_pj == static_cast<double>(counters.dram_bytes) * 8.0 * 7.0;
    size_t checked = 1;
    for (const auto* r : all_reports) {
        ++checked;
        if (r->mem.dram_energy_pj != static_cast<double>(r->mem.dram_bytes) * 8.0 * 7.0)
            energy_ok = false;
    }
    verdict(7, "memory model exactness", sequence_ok && energy_ok,
            "100000-access FIFO sequence matches the reference; energy = bytes*8*7 pJ on " +
                std::to_string(checked) + " runs");
}

// ---- criterion 8: determinism ------------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void check_determinism(const char* cli) {
    const auto root = fs::temp_directory_path() / "hgsim_acceptance";
    fs::remove_all(root);
    fs::create_directories(root);
    const std::string base =
        " --targets 2000 --relations 3 --overlap 0.6 --pool 2500 --feature-dim 8 "
        "--shared-sources --seed 11";
    bool ok = true;
    std::string detail;
    for (int round = 0; round < 2; ++round) {
        const auto dir = root / ("round" + std::to_string(round));
        const std::string cmd = std::string(cli) + " ablate" + base + " --out-dir " +
                                dir.string() + " > " + (dir.string() + ".log") + " 2>&1";
        fs::create_directories(dir);
        if (std::system(cmd.c_str()) != 0) {
            ok = false;
            detail = "ablate invocation failed";
        }
    }
    if (ok) {
        size_t files = 0;
        for (const auto& entry : fs::directory_iterator(root / "round0")) {
            ++files;
            const auto other = root / "round1" / entry.path().filename();
            if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
                ok = false;
                detail = "file " + entry.path().filename().string() + " differs";
            }
        }
        if (files == 0) {
            ok = false;
            detail = "no report files produced";
        }
        if (ok)
            detail = std::to_string(files) + " report files byte-identical across executions";
    }
    verdict(8, "determinism", ok, detail);
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::fprintf(stderr, "usage: acceptance <path-to-cli>\n");
        return 2;
    }
    std::vector<const SimReport*> reports;
    std::vector<AblationResult> keep_alive;
    try {
        check_equivalence_and_expansion();
        check_redundancy();
        check_grouping();
        check_dram_ladder(reports, keep_alive);
        check_cycle_model();
        check_memory_model(reports);
        check_determinism(argv[1]);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
        return 2;
    }
    std::printf("%s (%d criteria failed)\n", g_failures == 0 ? "ALL PASS" : "FAILURES",
                g_failures);
    return g_failures == 0 ? 0 : 1;
}
