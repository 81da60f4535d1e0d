// Experiment harness: synthetic graph generation, single simulation runs,
// the -B/-S/-P/-O ablation ladder, and functional oracle checks.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>

#include "hgsim/experiment.hpp"

namespace {

using namespace hgsim;

struct CommonFlags {
    std::string config_file;
    std::string graph_file;
    std::string graph_format = "text";
    std::string out_dir;
    std::string name;
    uint64_t seed = 0;
    bool have_seed = false;
    bool oracle_check = false;
    bool debug_trace = false;
};

void add_synthetic_flags(CLI::App* cmd, SyntheticSpec& spec, uint64_t& relations) {
    cmd->add_option("--targets", spec.num_targets, "target vertex count");
    cmd->add_option("--relations", relations, "number of relations (semantics)");
    cmd->add_option("--feature-dim", spec.feature_dim, "raw feature width");
    cmd->add_option("--gen-seed", spec.seed, "generator seed");
    cmd->add_flag("--shared-sources", spec.shared_sources,
                  "one source type for all relations (cross-semantic overlap)");
}

void add_relation_flags(CLI::App* cmd, SyntheticRelationSpec& rel) {
    cmd->add_option("--alpha", rel.fanout.alpha, "power-law exponent (> 1)");
    cmd->add_option("--k-min", rel.fanout.k_min, "minimum fanout");
    cmd->add_option("--k-max", rel.fanout.k_max, "maximum fanout");
    cmd->add_option("--pool", rel.source_pool_size, "source pool size per relation");
    cmd->add_option("--overlap", rel.overlap_rho, "shared-neighbor overlap in [0,1]");
}

GraphFormat parse_format(const std::string& f) {
    if (f == "text") return GraphFormat::EdgeListText;
    if (f == "binary") return GraphFormat::Binary;
    throw ConfigError("--format expects text|binary, got '" + f + "'");
}

ExperimentConfig build_config(const CommonFlags& flags, const SyntheticSpec& synth,
                              uint64_t relations, const SyntheticRelationSpec& rel,
                              const CLI::App* cmd) {
    ExperimentConfig cfg;
    cfg.synthetic = synth;
    cfg.synthetic.relations.assign(std::max<uint64_t>(relations, 1), rel);
    if (!flags.config_file.empty()) apply_config_file(flags.config_file, cfg);
    if (!flags.graph_file.empty()) {
        cfg.graph_file = flags.graph_file;
        cfg.graph_format = parse_format(flags.graph_format);
    }
    if (!flags.out_dir.empty()) cfg.out_dir = flags.out_dir;
    if (!flags.name.empty()) cfg.name = flags.name;
    if (flags.have_seed) {
        cfg.seed = flags.seed;
        cfg.synthetic.seed = flags.seed;
        cfg.model.seed = flags.seed;
    }
    if (flags.oracle_check) cfg.oracle_check = true;
    if (flags.debug_trace) cfg.debug_trace = true;
    // Synthetic flags given on the command line override the config file.
    if (cmd->count("--targets")) cfg.synthetic.num_targets = synth.num_targets;
    if (cmd->count("--relations"))
        cfg.synthetic.relations.assign(std::max<uint64_t>(relations, 1),
                                       cfg.synthetic.relations.empty()
                                           ? rel
                                           : cfg.synthetic.relations.front());
    for (auto& r : cfg.synthetic.relations) {
        if (cmd->count("--alpha")) r.fanout.alpha = rel.fanout.alpha;
        if (cmd->count("--k-min")) r.fanout.k_min = rel.fanout.k_min;
        if (cmd->count("--k-max")) r.fanout.k_max = rel.fanout.k_max;
        if (cmd->count("--pool")) r.source_pool_size = rel.source_pool_size;
        if (cmd->count("--overlap")) r.overlap_rho = rel.overlap_rho;
    }
    if (cmd->count("--feature-dim")) cfg.synthetic.feature_dim = synth.feature_dim;
    if (cmd->count("--gen-seed")) cfg.synthetic.seed = synth.seed;
    if (cmd->count("--shared-sources")) cfg.synthetic.shared_sources = synth.shared_sources;
    return cfg;
}

int cmd_gen(const ExperimentConfig& cfg, const std::string& out, const std::string& format,
            bool report) {
    const auto lg = generate_synthetic(cfg.synthetic);
    save_graph(lg, out, parse_format(format));
    if (report) {
        const auto sems = build_semantic_graphs(lg.graph, lg.graph.target_type);
        std::cout << "vertices " << lg.graph.total_vertices() << " edges "
                  << lg.graph.total_edges() << " mean_consecutive_jaccard "
                  << mean_consecutive_jaccard(sems) << '\n';
    }
    std::cout << "wrote " << out << '\n';
    return 0;
}

int cmd_run(ExperimentConfig cfg, const std::string& dump_embeddings) {
    cfg.validate();
    std::cout << "resolved config:\n" << cfg.to_json().dump(2) << '\n';
    const auto lg = obtain_graph(cfg);
    const auto run = run_single(cfg, lg);
    write_run_report(cfg, run);
    if (!dump_embeddings.empty()) write_matrix(run.functional.embeddings, dump_embeddings);
    std::cout << "cycles " << run.sim.total_cycles << " dram_bytes " << run.sim.mem.dram_bytes
              << " expansion " << run.metrics.expansion_ratio << " redundancy "
              << run.metrics.redundancy_fraction << '\n';
    std::cout << "report: " << (std::filesystem::path(cfg.out_dir) / (cfg.name + ".json")).string()
              << '\n';
    return 0;
}

int cmd_ablate(ExperimentConfig cfg) {
    cfg.validate();
    std::cout << "resolved base config:\n" << cfg.to_json().dump(2) << '\n';
    const auto lg = obtain_graph(cfg);
    const auto res = run_ablation(cfg, lg);
    std::filesystem::create_directories(cfg.out_dir);
    for (size_t i = 0; i < res.runs.size(); ++i) {
        const char step = "BSPO"[i];
        const auto step_cfg = ablation_step_config(cfg, step);
        write_run_report(step_cfg, res.runs[i]);
    }
    const auto csv_path = (std::filesystem::path(cfg.out_dir) / (cfg.name + "-ablation.csv"));
    write_file_atomic(csv_path.string(), res.csv);
    std::cout << res.csv;
    std::cout << "wrote " << csv_path.string() << '\n';
    return 0;
}

int cmd_check(ExperimentConfig cfg) {
    cfg.validate();
    const auto lg = obtain_graph(cfg);
    const auto& g = lg.graph;
    FeatureStore store = lg.features;
    const auto sems = build_semantic_graphs(g, g.target_type);
    const auto params = init_model_params(g, cfg.model);
    const auto plan = make_plan(cfg, sems);
    const auto order = plan.flatten();

    int failures = 0;
    auto verdict = [&](const char* what, bool ok, const std::string& detail = "") {
        std::cout << (ok ? "PASS " : "FAIL ") << what;
        if (!detail.empty()) std::cout << " (" << detail << ")";
        std::cout << '\n';
        if (!ok) ++failures;
    };

    const auto ps = run_per_semantic(g, sems, store, params, cfg.model, order);
    const auto sc = run_semantics_complete(g, sems, store, params, cfg.model, order);
    verdict("paradigm-equivalence", ps.embeddings == sc.embeddings);
    verdict("expansion-ordering",
            expansion_ratio(sc.ledger, g, store) <= expansion_ratio(ps.ledger, g, store));

    auto shuffled = order;
    Rng rng(cfg.seed ^ 0xabcdef);
    rng.shuffle(shuffled);
    const auto sc2 = run_semantics_complete(g, sems, store, params, cfg.model, shuffled);
    verdict("order-independence", sc.embeddings == sc2.embeddings &&
                                      sc.trace.total_reads() == sc2.trace.total_reads());

    const auto sim = simulate_run(g, sems, params, cfg.model, store, plan, cfg.paradigm, cfg.hw);
    const auto& functional = cfg.paradigm == Paradigm::SemanticsComplete ? sc : ps;
    const auto cc = cross_check(functional.trace, sim.mem);
    verdict("trace-counter-cross-check", cc.pass, cc.detail);

    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cycle-level simulator for a multi-channel HGNN inference accelerator"};
    app.require_subcommand(1);

    CommonFlags flags;
    SyntheticSpec synth;
    SyntheticRelationSpec rel;
    uint64_t relations = 3;

    std::string gen_out, gen_format = "text";
    bool gen_report = false;
    std::string dump_embeddings;

    auto add_common = [&](CLI::App* cmd, bool with_graph) {
        cmd->add_option("--config", flags.config_file, "config file (key = value with [sections])");
        if (with_graph) {
            cmd->add_option("--graph", flags.graph_file, "graph file instead of a synthetic one");
            cmd->add_option("--format", flags.graph_format, "graph file format: text|binary");
        }
        cmd->add_option("--out-dir", flags.out_dir, "report output directory");
        cmd->add_option("--name", flags.name, "run name (report file stem)");
        auto* s = cmd->add_option("--seed", flags.seed, "master seed (graph, model, grouping)");
        s->each([&](const std::string&) { flags.have_seed = true; });
        cmd->add_flag("--oracle-check", flags.oracle_check,
                      "run both paradigms and require equal embeddings");
        cmd->add_flag("--debug-trace", flags.debug_trace, "dump ledger/trace/plan CSVs");
        add_synthetic_flags(cmd, synth, relations);
        add_relation_flags(cmd, rel);
    };

    auto* gen = app.add_subcommand("gen", "generate a synthetic graph file");
    add_common(gen, false);
    gen->add_option("--out", gen_out, "output path")->required();
    gen->add_option("--out-format", gen_format, "output format: text|binary");
    gen->add_flag("--report", gen_report, "print size and overlap statistics");

    auto* run = app.add_subcommand("run", "one configured simulation run");
    add_common(run, true);
    run->add_option("--dump-embeddings", dump_embeddings, "write embeddings matrix dump");
    std::string run_paradigm, run_grouping;
    uint64_t run_channels = 0;
    run->add_option("--paradigm", run_paradigm, "per-semantic|semantics-complete");
    run->add_option("--grouping", run_grouping, "sequential|random|overlap");
    run->add_option("--channels", run_channels, "processing channel count");

    auto* ablate = app.add_subcommand("ablate", "run the -B/-S/-P/-O ladder");
    add_common(ablate, true);
    uint64_t ablate_channels = 0;
    ablate->add_option("--channels", ablate_channels, "channels for the -P/-O steps");

    auto* check = app.add_subcommand("check", "functional oracle suites");
    add_common(check, true);

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            const auto cfg = build_config(flags, synth, relations, rel, gen);
            return cmd_gen(cfg, gen_out, gen_format, gen_report);
        }
        if (run->parsed()) {
            auto cfg = build_config(flags, synth, relations, rel, run);
            if (!run_paradigm.empty())
                cfg.paradigm = run_paradigm == "per-semantic" ? Paradigm::PerSemantic
                                                              : Paradigm::SemanticsComplete;
            if (!run_grouping.empty()) {
                if (run_grouping == "sequential") cfg.grouping = GroupingKind::Sequential;
                else if (run_grouping == "random") cfg.grouping = GroupingKind::Random;
                else if (run_grouping == "overlap") cfg.grouping = GroupingKind::Overlap;
                else throw ConfigError("--grouping expects sequential|random|overlap");
            }
            if (run_channels > 0)
                cfg.hw.channels.n_channels = static_cast<uint32_t>(run_channels);
            return cmd_run(cfg, dump_embeddings);
        }
        if (ablate->parsed()) {
            auto cfg = build_config(flags, synth, relations, rel, ablate);
            if (ablate_channels > 0)
                cfg.hw.channels.n_channels = static_cast<uint32_t>(ablate_channels);
            return cmd_ablate(cfg);
        }
        if (check->parsed()) {
            return cmd_check(build_config(flags, synth, relations, rel, check));
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
