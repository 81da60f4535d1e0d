#pragma once

#include "hgsim/metrics.hpp"
#include "hgsim/synthetic.hpp"

namespace hgsim {

enum class GroupingKind : uint8_t { Sequential = 0, Random = 1, Overlap = 2 };
const char* to_string(GroupingKind k);

struct ExperimentConfig {
    // Graph source: a file when set, otherwise the synthetic spec.
    std::string graph_file;
    GraphFormat graph_format = GraphFormat::EdgeListText;
    SyntheticSpec synthetic;

    ModelConfig model;
    HwConfig hw;

    Paradigm paradigm = Paradigm::SemanticsComplete;
    GroupingKind grouping = GroupingKind::Overlap;
    double hypergraph_delta = 0.15;
    uint64_t seed = 1;

    std::string name = "run";
    std::string out_dir = ".";
    bool oracle_check = false;
    bool debug_trace = false;

    nlohmann::ordered_json to_json() const;  // full resolved config echo
    void validate() const;
};

// Key/value config file with [sections]; '#' or ';' start comments. Unknown
// keys are configuration errors naming the key. Values already set on `cfg`
// act as defaults.
void apply_config_file(const std::string& path, ExperimentConfig& cfg);
void apply_config_text(std::istream& in, ExperimentConfig& cfg,
                       const std::string& origin = "<config>");

struct RunArtifacts {
    GroupPlan plan;
    OverlapHypergraph hypergraph;  // empty unless overlap grouping was used
    FunctionalResult functional;
    SimReport sim;
    MetricsBundle metrics;
};

LoadedGraph obtain_graph(const ExperimentConfig& cfg);

GroupPlan make_plan(const ExperimentConfig& cfg, const SemanticGraphSet& sems,
                    OverlapHypergraph* hypergraph_out = nullptr);

// One full run: SGB, grouping, functional reference execution, cycle-level
// simulation, consolidated metrics. With oracle_check set, both paradigms
// are executed and their embeddings compared first.
RunArtifacts run_single(const ExperimentConfig& cfg, const LoadedGraph& lg,
                        const SimReport* baseline = nullptr,
                        const std::string& baseline_name = "");

// The four-step optimization ladder:
//   -B  1 channel,  per-semantic,       sequential grouping
//   -S  1 channel,  semantics-complete, sequential grouping
//   -P  n channels, semantics-complete, random grouping
//   -O  n channels, semantics-complete, overlap-driven grouping
// Speedups are reported against -B.
struct AblationResult {
    std::vector<RunArtifacts> runs;  // B, S, P, O
    std::string csv;
};

ExperimentConfig ablation_step_config(const ExperimentConfig& base, char step);
AblationResult run_ablation(const ExperimentConfig& base, const LoadedGraph& lg);

// Writes via a temp file and rename so concurrent sweeps never observe a
// partial report.
void write_file_atomic(const std::string& path, const std::string& content);

// Report file with the resolved config, simulator counters and metrics.
nlohmann::ordered_json report_json(const ExperimentConfig& cfg, const RunArtifacts& run);
void write_run_report(const ExperimentConfig& cfg, const RunArtifacts& run);

}  // namespace hgsim
