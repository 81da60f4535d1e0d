#pragma once

#include <json.hpp>

#include "hgsim/grouping.hpp"
#include "hgsim/memory_sim.hpp"
#include "hgsim/reference_engine.hpp"

namespace hgsim {

// One reconfigurable PE: a reduction tree whose first layer holds
// `first_layer_units` multiply-or-accumulate units, with adders above.
struct RpeConfig {
    uint32_t first_layer_units = 4;  // power of two

    uint32_t tree_depth() const { return ceil_log2(first_layer_units) + 1; }
    void validate() const {
        if (!is_power_of_two(first_layer_units))
            throw ConfigError("rpe: first layer width must be a power of two");
    }
};

struct ChannelConfig {
    uint32_t n_channels = 4;
    uint32_t rpes_per_channel = 512;
    // Fraction of a channel's RPEs reconfigured to aggregation mode after FP.
    // RGCN-like models need no linear units during NA and use 1.0.
    double agg_fraction_rgat = 0.75;
};

struct HwConfig {
    RpeConfig rpe;
    ChannelConfig channels;
    CacheConfig cache;
    HbmConfig hbm;
    BufferConfig buffers;
    GrouperHwConfig grouper;
    EnergyConfig energy;
    uint32_t fetch_issue_per_cycle = 4;  // cache lookups a channel issues per cycle
    uint32_t mode_switch_cycles = 1;
    uint32_t activation_width = 512;  // elements per cycle through the activation module
    bool unit_trace = false;

    void validate() const;
};

// Linear mode: one matrix-A operand held in a register, m columns streamed.
// cycles = m * ceil(k / L) + tree depth
uint64_t rpe_linear_cycles(uint64_t k, uint64_t m, const RpeConfig& cfg);

// Aggregation mode: 2L vectors reduced per pass element-wise, the running
// result fed back across passes; an unpaired vector in the final pass rides
// the feedback path and costs three extra cycles.
// cycles = d * ceil(n / 2L) + tree depth + 3 * odd
uint64_t rpe_aggregation_cycles(uint64_t n, uint64_t d, const RpeConfig& cfg);

struct UnitTraceEntry {
    uint32_t channel = 0;
    std::string kind;  // fp-linear | na-linear | na-agg | sf-agg
    uint32_t unit = 0;
    uint64_t start = 0;
    uint64_t end = 0;
};

struct SimReport {
    std::string paradigm;
    std::string model_variant;
    uint32_t n_channels = 0;
    uint32_t total_rpes = 0;
    RunFingerprint fingerprint;
    uint64_t plan_hash = 0;

    uint64_t total_cycles = 0;
    uint64_t fp_cycles = 0;
    uint64_t na_sf_cycles = 0;
    std::vector<uint64_t> channel_end_cycles;
    std::vector<uint64_t> channel_stall_cycles;  // waiting on group release
    uint64_t grouper_cycles = 0;
    uint64_t grouper_mac_ops = 0;

    uint64_t busy_linear_cycles = 0;
    uint64_t busy_agg_cycles = 0;
    uint64_t linear_tasks = 0;
    uint64_t agg_tasks = 0;
    uint64_t linear_moa_ops = 0;
    uint64_t agg_elem_ops = 0;
    uint64_t activation_elems = 0;
    double rpe_utilization = 0.0;

    MemCounters mem;

    // Populated when hw.unit_trace; excluded from the JSON report.
    std::vector<UnitTraceEntry> unit_trace;
    std::vector<MemAccessLogEntry> access_log;

    nlohmann::ordered_json to_json() const;
    void dump_unit_trace_csv(std::ostream& out) const;   // channel,kind,unit,start,end
    void dump_access_log_csv(std::ostream& out) const;   // cycle,type,id,stage,role,level,bytes
};

// Cycle-level run of one group plan under one paradigm. Functional values
// are not recomputed; the iteration order matches the reference engine so
// memory traces correspond one to one.
SimReport simulate_run(const HetGraph& g, const SemanticGraphSet& sems, const ModelParams& params,
                       const ModelConfig& mcfg, const FeatureStore& store, const GroupPlan& plan,
                       Paradigm paradigm, const HwConfig& hw);

}  // namespace hgsim
