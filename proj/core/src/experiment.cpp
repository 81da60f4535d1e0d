#include "hgsim/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace hgsim {

const char* to_string(GroupingKind k) {
    switch (k) {
        case GroupingKind::Sequential: return "sequential";
        case GroupingKind::Random: return "random";
        case GroupingKind::Overlap: return "overlap";
    }
    return "?";
}

void ExperimentConfig::validate() const {
    model.validate();
    hw.validate();
    if (!(hypergraph_delta > 0.0) || hypergraph_delta > 1.0)
        throw ConfigError("run: delta must be in (0, 1]");
    if (name.empty()) throw ConfigError("run: name must not be empty");
}

nlohmann::ordered_json ExperimentConfig::to_json() const {
    nlohmann::ordered_json j;
    j["graph"] = {{"file", graph_file},
                  {"format", graph_format == GraphFormat::Binary ? "binary" : "text"}};
    if (graph_file.empty()) {
        const auto& rel = synthetic.relations.empty() ? SyntheticRelationSpec{}
                                                      : synthetic.relations.front();
        j["synthetic"] = {{"targets", synthetic.num_targets},
                          {"relations", synthetic.relations.size()},
                          {"alpha", rel.fanout.alpha},
                          {"k_min", rel.fanout.k_min},
                          {"k_max", rel.fanout.k_max},
                          {"pool", rel.source_pool_size},
                          {"overlap", rel.overlap_rho},
                          {"feature_dim", synthetic.feature_dim},
                          {"seed", synthetic.seed},
                          {"shared_sources", synthetic.shared_sources}};
    }
    j["model"] = {{"variant", to_string(model.variant)},
                  {"d_hid", model.d_hid},
                  {"d_out", model.d_out},
                  {"activation", model.activation == Activation::Relu ? "relu" : "leaky-relu"},
                  {"leaky_slope", model.leaky_slope},
                  {"seed", model.seed}};
    j["hardware"] = {{"channels", hw.channels.n_channels},
                     {"rpes_per_channel", hw.channels.rpes_per_channel},
                     {"rpe_fanin", hw.rpe.first_layer_units},
                     {"agg_fraction_rgat", hw.channels.agg_fraction_rgat},
                     {"global_cache_bytes", hw.cache.global_bytes},
                     {"local_cache_bytes", hw.cache.local_bytes},
                     {"line_bytes", hw.cache.line_bytes},
                     {"hbm_bytes_per_cycle", hw.hbm.bytes_per_cycle},
                     {"hbm_latency", hw.hbm.latency_cycles},
                     {"hbm_energy_pj_per_bit", hw.hbm.energy_pj_per_bit},
                     {"max_outstanding_misses", hw.hbm.max_outstanding_misses},
                     {"fetch_issue_per_cycle", hw.fetch_issue_per_cycle},
                     {"mode_switch_cycles", hw.mode_switch_cycles},
                     {"activation_width", hw.activation_width},
                     {"weight_buffer", hw.buffers.weight_bytes},
                     {"target_buffer", hw.buffers.target_bytes},
                     {"attention_buffer", hw.buffers.attention_bytes},
                     {"adjacency_buffer", hw.buffers.adjacency_bytes},
                     {"grouper_buffer", hw.buffers.grouper_bytes},
                     {"grouper_macs", hw.grouper.n_mac},
                     {"grouper_update_cycles", hw.grouper.c_update}};
    // out_dir is environment, not experiment: reports stay byte-identical
    // wherever they are written.
    j["run"] = {{"paradigm", to_string(paradigm)},
                {"grouping", to_string(grouping)},
                {"delta", hypergraph_delta},
                {"seed", seed},
                {"name", name},
                {"oracle_check", oracle_check},
                {"debug_trace", debug_trace}};
    return j;
}

namespace {

uint64_t parse_u64(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const uint64_t x = std::stoull(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'");
    }
}

double parse_f64(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

void set_relation_count(SyntheticSpec& spec, size_t n) {
    SyntheticRelationSpec proto =
        spec.relations.empty() ? SyntheticRelationSpec{} : spec.relations.front();
    spec.relations.assign(n, proto);
}

template <typename F>
void for_each_relation(SyntheticSpec& spec, F&& f) {
    if (spec.relations.empty()) spec.relations.emplace_back();
    for (auto& r : spec.relations) f(r);
}

}  // namespace

void apply_config_text(std::istream& in, ExperimentConfig& cfg, const std::string& origin) {
    using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;
    static const std::map<std::string, Setter> setters = {
        {"graph.file", [](auto& c, auto& v, auto&) { c.graph_file = v; }},
        {"graph.format",
         [](auto& c, auto& v, auto& k) {
             if (v == "text")
                 c.graph_format = GraphFormat::EdgeListText;
             else if (v == "binary")
                 c.graph_format = GraphFormat::Binary;
             else
                 throw ConfigError("config: key '" + k + "' expects text|binary, got '" + v + "'");
         }},
        {"synthetic.targets",
         [](auto& c, auto& v, auto& k) { c.synthetic.num_targets = parse_u64(v, k); }},
        {"synthetic.relations",
         [](auto& c, auto& v, auto& k) { set_relation_count(c.synthetic, parse_u64(v, k)); }},
        {"synthetic.alpha",
         [](auto& c, auto& v, auto& k) {
             for_each_relation(c.synthetic, [&](auto& r) { r.fanout.alpha = parse_f64(v, k); });
         }},
        {"synthetic.k_min",
         [](auto& c, auto& v, auto& k) {
             for_each_relation(c.synthetic,
                               [&](auto& r) { r.fanout.k_min = static_cast<uint32_t>(parse_u64(v, k)); });
         }},
        {"synthetic.k_max",
         [](auto& c, auto& v, auto& k) {
             for_each_relation(c.synthetic,
                               [&](auto& r) { r.fanout.k_max = static_cast<uint32_t>(parse_u64(v, k)); });
         }},
        {"synthetic.pool",
         [](auto& c, auto& v, auto& k) {
             for_each_relation(c.synthetic, [&](auto& r) {
                 r.source_pool_size = static_cast<uint32_t>(parse_u64(v, k));
             });
         }},
        {"synthetic.overlap",
         [](auto& c, auto& v, auto& k) {
             for_each_relation(c.synthetic, [&](auto& r) { r.overlap_rho = parse_f64(v, k); });
         }},
        {"synthetic.feature_dim",
         [](auto& c, auto& v, auto& k) {
             c.synthetic.feature_dim = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"synthetic.seed", [](auto& c, auto& v, auto& k) { c.synthetic.seed = parse_u64(v, k); }},
        {"synthetic.shared_sources",
         [](auto& c, auto& v, auto& k) { c.synthetic.shared_sources = parse_bool(v, k); }},
        {"model.variant",
         [](auto& c, auto& v, auto& k) {
             if (v == "rgcn-like" || v == "rgcn")
                 c.model.variant = ModelVariant::RgcnLike;
             else if (v == "rgat-like" || v == "rgat")
                 c.model.variant = ModelVariant::RgatLike;
             else
                 throw ConfigError("config: key '" + k + "' expects rgcn-like|rgat-like, got '" +
                                   v + "'");
         }},
        {"model.d_hid",
         [](auto& c, auto& v, auto& k) { c.model.d_hid = static_cast<uint32_t>(parse_u64(v, k)); }},
        {"model.d_out",
         [](auto& c, auto& v, auto& k) { c.model.d_out = static_cast<uint32_t>(parse_u64(v, k)); }},
        {"model.activation",
         [](auto& c, auto& v, auto& k) {
             if (v == "relu")
                 c.model.activation = Activation::Relu;
             else if (v == "leaky-relu")
                 c.model.activation = Activation::LeakyRelu;
             else
                 throw ConfigError("config: key '" + k + "' expects relu|leaky-relu, got '" + v +
                                   "'");
         }},
        {"model.leaky_slope",
         [](auto& c, auto& v, auto& k) { c.model.leaky_slope = static_cast<float>(parse_f64(v, k)); }},
        {"model.seed", [](auto& c, auto& v, auto& k) { c.model.seed = parse_u64(v, k); }},
        {"hardware.channels",
         [](auto& c, auto& v, auto& k) {
             c.hw.channels.n_channels = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.rpes_per_channel",
         [](auto& c, auto& v, auto& k) {
             c.hw.channels.rpes_per_channel = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.rpe_fanin",
         [](auto& c, auto& v, auto& k) {
             c.hw.rpe.first_layer_units = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.agg_fraction_rgat",
         [](auto& c, auto& v, auto& k) { c.hw.channels.agg_fraction_rgat = parse_f64(v, k); }},
        {"hardware.global_cache_bytes",
         [](auto& c, auto& v, auto& k) { c.hw.cache.global_bytes = parse_u64(v, k); }},
        {"hardware.local_cache_bytes",
         [](auto& c, auto& v, auto& k) { c.hw.cache.local_bytes = parse_u64(v, k); }},
        {"hardware.line_bytes",
         [](auto& c, auto& v, auto& k) {
             c.hw.cache.line_bytes = static_cast<uint32_t>(parse_u64(v, k));
             c.hw.hbm.transaction_bytes = c.hw.cache.line_bytes;
         }},
        {"hardware.hbm_bytes_per_cycle",
         [](auto& c, auto& v, auto& k) { c.hw.hbm.bytes_per_cycle = parse_u64(v, k); }},
        {"hardware.hbm_latency",
         [](auto& c, auto& v, auto& k) {
             c.hw.hbm.latency_cycles = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.hbm_energy_pj_per_bit",
         [](auto& c, auto& v, auto& k) { c.hw.hbm.energy_pj_per_bit = parse_f64(v, k); }},
        {"hardware.max_outstanding_misses",
         [](auto& c, auto& v, auto& k) {
             c.hw.hbm.max_outstanding_misses = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.fetch_issue_per_cycle",
         [](auto& c, auto& v, auto& k) {
             c.hw.fetch_issue_per_cycle = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.mode_switch_cycles",
         [](auto& c, auto& v, auto& k) {
             c.hw.mode_switch_cycles = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.activation_width",
         [](auto& c, auto& v, auto& k) {
             c.hw.activation_width = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.weight_buffer",
         [](auto& c, auto& v, auto& k) { c.hw.buffers.weight_bytes = parse_u64(v, k); }},
        {"hardware.target_buffer",
         [](auto& c, auto& v, auto& k) { c.hw.buffers.target_bytes = parse_u64(v, k); }},
        {"hardware.attention_buffer",
         [](auto& c, auto& v, auto& k) { c.hw.buffers.attention_bytes = parse_u64(v, k); }},
        {"hardware.adjacency_buffer",
         [](auto& c, auto& v, auto& k) { c.hw.buffers.adjacency_bytes = parse_u64(v, k); }},
        {"hardware.grouper_buffer",
         [](auto& c, auto& v, auto& k) { c.hw.buffers.grouper_bytes = parse_u64(v, k); }},
        {"hardware.grouper_macs",
         [](auto& c, auto& v, auto& k) {
             c.hw.grouper.n_mac = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"hardware.grouper_update_cycles",
         [](auto& c, auto& v, auto& k) {
             c.hw.grouper.c_update = static_cast<uint32_t>(parse_u64(v, k));
         }},
        {"run.paradigm",
         [](auto& c, auto& v, auto& k) {
             if (v == "per-semantic")
                 c.paradigm = Paradigm::PerSemantic;
             else if (v == "semantics-complete")
                 c.paradigm = Paradigm::SemanticsComplete;
             else
                 throw ConfigError("config: key '" + k +
                                   "' expects per-semantic|semantics-complete, got '" + v + "'");
         }},
        {"run.grouping",
         [](auto& c, auto& v, auto& k) {
             if (v == "sequential")
                 c.grouping = GroupingKind::Sequential;
             else if (v == "random")
                 c.grouping = GroupingKind::Random;
             else if (v == "overlap")
                 c.grouping = GroupingKind::Overlap;
             else
                 throw ConfigError("config: key '" + k +
                                   "' expects sequential|random|overlap, got '" + v + "'");
         }},
        {"run.delta", [](auto& c, auto& v, auto& k) { c.hypergraph_delta = parse_f64(v, k); }},
        {"run.seed", [](auto& c, auto& v, auto& k) { c.seed = parse_u64(v, k); }},
        {"run.name", [](auto& c, auto& v, auto&) { c.name = v; }},
        {"run.out_dir", [](auto& c, auto& v, auto&) { c.out_dir = v; }},
        {"run.oracle_check",
         [](auto& c, auto& v, auto& k) { c.oracle_check = parse_bool(v, k); }},
        {"run.debug_trace", [](auto& c, auto& v, auto& k) { c.debug_trace = parse_bool(v, k); }},
    };

    std::string section;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto cut = line.find_first_of("#;");
        if (cut != std::string::npos) line.resize(cut);
        auto strip = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string::npos) return std::string{};
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        };
        const std::string text = strip(line);
        if (text.empty()) continue;
        if (text.front() == '[') {
            if (text.back() != ']')
                throw ConfigError(origin + ":" + std::to_string(line_no) + ": malformed section");
            section = strip(text.substr(1, text.size() - 2));
            continue;
        }
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key = value");
        const std::string key =
            (section.empty() ? "" : section + ".") + strip(text.substr(0, eq));
        const std::string value = strip(text.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end())
            throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key +
                              "'");
        it->second(cfg, value, key);
    }
}

void apply_config_file(const std::string& path, ExperimentConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    apply_config_text(in, cfg, path);
}

LoadedGraph obtain_graph(const ExperimentConfig& cfg) {
    if (!cfg.graph_file.empty()) return load_graph(cfg.graph_file, cfg.graph_format);
    return generate_synthetic(cfg.synthetic);
}

GroupPlan make_plan(const ExperimentConfig& cfg, const SemanticGraphSet& sems,
                    OverlapHypergraph* hypergraph_out) {
    const uint32_t channels = cfg.hw.channels.n_channels;
    switch (cfg.grouping) {
        case GroupingKind::Sequential:
            return group_sequential(sems.target_count, channels);
        case GroupingKind::Random:
            return group_random(sems.target_count, channels, cfg.seed);
        case GroupingKind::Overlap: {
            auto h = build_hypergraph(sems, cfg.hypergraph_delta);
            auto plan = group_overlap_driven(h, sems.target_count, channels, cfg.seed);
            if (hypergraph_out != nullptr) *hypergraph_out = std::move(h);
            return plan;
        }
    }
    throw ConfigError("unknown grouping kind");
}

RunArtifacts run_single(const ExperimentConfig& cfg, const LoadedGraph& lg,
                        const SimReport* baseline, const std::string& baseline_name) {
    cfg.validate();
    const HetGraph& g = lg.graph;
    FeatureStore store = lg.features;  // projected features are run-local

    const auto sems = build_semantic_graphs(g, g.target_type);
    const auto params = init_model_params(g, cfg.model);

    RunArtifacts out;
    out.plan = make_plan(cfg, sems, &out.hypergraph);
    const auto order = out.plan.flatten();

    if (cfg.oracle_check) {
        auto ps = run_per_semantic(g, sems, store, params, cfg.model, order);
        auto sc = run_semantics_complete(g, sems, store, params, cfg.model, order);
        if (!(ps.embeddings == sc.embeddings))
            throw NumericError("oracle check: paradigm embeddings differ");
    }

    out.functional = cfg.paradigm == Paradigm::SemanticsComplete
                         ? run_semantics_complete(g, sems, store, params, cfg.model, order)
                         : run_per_semantic(g, sems, store, params, cfg.model, order);
    auto hw = cfg.hw;
    hw.unit_trace = hw.unit_trace || cfg.debug_trace;
    out.sim = simulate_run(g, sems, params, cfg.model, store, out.plan, cfg.paradigm, hw);

    const auto check = cross_check(out.functional.trace, out.sim.mem);
    if (!check.pass)
        throw ValidationError("trace/counter cross-check failed: " + check.detail);

    out.metrics = consolidate(out.functional, g, store, out.sim, cfg.hw.energy,
                              {cfg.name, to_string(cfg.grouping), cfg.seed}, baseline,
                              baseline_name);
    return out;
}

ExperimentConfig ablation_step_config(const ExperimentConfig& base, char step) {
    ExperimentConfig c = base;
    c.name = base.name + "-" + step;
    switch (step) {
        case 'B':
            c.hw.channels.n_channels = 1;
            c.paradigm = Paradigm::PerSemantic;
            c.grouping = GroupingKind::Sequential;
            break;
        case 'S':
            c.hw.channels.n_channels = 1;
            c.paradigm = Paradigm::SemanticsComplete;
            c.grouping = GroupingKind::Sequential;
            break;
        case 'P':
            c.paradigm = Paradigm::SemanticsComplete;
            c.grouping = GroupingKind::Random;
            break;
        case 'O':
            c.paradigm = Paradigm::SemanticsComplete;
            c.grouping = GroupingKind::Overlap;
            break;
        default:
            throw ConfigError("unknown ablation step");
    }
    return c;
}

AblationResult run_ablation(const ExperimentConfig& base, const LoadedGraph& lg) {
    AblationResult res;
    SimReport baseline;  // copy: res.runs reallocates as the ladder grows
    std::string baseline_name;
    for (char step : {'B', 'S', 'P', 'O'}) {
        const auto cfg = ablation_step_config(base, step);
        res.runs.push_back(run_single(cfg, lg, baseline_name.empty() ? nullptr : &baseline,
                                      baseline_name));
        if (step == 'B') {
            baseline = res.runs.front().sim;
            baseline_name = cfg.name;
        }
    }
    std::ostringstream csv;
    csv << MetricsBundle::csv_header() << '\n';
    for (const auto& run : res.runs) csv << run.metrics.csv_row() << '\n';
    res.csv = csv.str();
    return res;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out << content;
    }
    std::filesystem::rename(tmp, path);
}

nlohmann::ordered_json report_json(const ExperimentConfig& cfg, const RunArtifacts& run) {
    nlohmann::ordered_json j;
    j["config"] = cfg.to_json();
    j["sim"] = run.sim.to_json();
    j["metrics"] = run.metrics.to_json();
    return j;
}

void write_run_report(const ExperimentConfig& cfg, const RunArtifacts& run) {
    std::filesystem::create_directories(cfg.out_dir);
    const auto path = (std::filesystem::path(cfg.out_dir) / (cfg.name + ".json")).string();
    write_file_atomic(path, report_json(cfg, run).dump(2) + "\n");
    if (cfg.debug_trace) {
        const auto base = std::filesystem::path(cfg.out_dir) / cfg.name;
        std::ostringstream ledger_csv, trace_csv, plan_csv, units_csv, mem_csv;
        run.functional.ledger.dump_csv(ledger_csv);
        run.functional.trace.dump_csv(trace_csv);
        run.plan.dump_csv(plan_csv);
        run.sim.dump_unit_trace_csv(units_csv);
        run.sim.dump_access_log_csv(mem_csv);
        write_file_atomic(base.string() + ".ledger.csv", ledger_csv.str());
        write_file_atomic(base.string() + ".trace.csv", trace_csv.str());
        write_file_atomic(base.string() + ".plan.csv", plan_csv.str());
        write_file_atomic(base.string() + ".units.csv", units_csv.str());
        write_file_atomic(base.string() + ".mem.csv", mem_csv.str());
        if (!run.hypergraph.supers.empty()) {
            std::ostringstream hyper_csv;
            run.hypergraph.dump_csv(hyper_csv);
            write_file_atomic(base.string() + ".hypergraph.csv", hyper_csv.str());
        }
    }
}

}  // namespace hgsim
