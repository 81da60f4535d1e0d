#include "hgsim/metrics.hpp"

#include <sstream>

namespace hgsim {

EnergyBreakdown energy_breakdown(const SimReport& sim, const EnergyConfig& cfg) {
    EnergyBreakdown e;
    e.dram_pj = sim.mem.dram_energy_pj;
    e.rpe_pj = static_cast<double>(sim.linear_moa_ops + sim.agg_elem_ops) * cfg.rpe_pj_per_op +
               static_cast<double>(sim.activation_elems) * cfg.activation_pj_per_elem;
    e.caches_pj = static_cast<double>(sim.mem.local_hit_bytes) * cfg.local_hit_pj_per_byte +
                  static_cast<double>(sim.mem.global_hit_bytes) * cfg.global_hit_pj_per_byte +
                  static_cast<double>(sim.mem.buffer_preload_bytes) * cfg.buffer_pj_per_byte;
    e.grouper_pj = static_cast<double>(sim.grouper_mac_ops) * cfg.grouper_pj_per_op;
    e.total_pj = e.dram_pj + e.rpe_pj + e.caches_pj + e.grouper_pj;
    return e;
}

MetricsBundle consolidate(const FunctionalResult& functional, const HetGraph& g,
                          const FeatureStore& features, const SimReport& sim,
                          const EnergyConfig& energy, const RunLabel& label,
                          const SimReport* baseline, const std::string& baseline_name) {
    if (!(functional.fingerprint == sim.fingerprint))
        throw ValidationError("consolidate: functional and simulator run fingerprints differ");

    MetricsBundle m;
    m.name = label.name;
    m.paradigm = sim.paradigm;
    m.model_variant = sim.model_variant;
    m.grouping = label.grouping;
    m.seed = label.seed;

    m.expansion_ratio = expansion_ratio(functional.ledger, g, features);
    m.redundancy_fraction = redundancy_fraction(functional.trace);
    m.cycles = sim.total_cycles;
    m.dram_bytes = sim.mem.dram_bytes;
    m.dram_transactions = sim.mem.dram_transactions;
    m.feature_dram_bytes = sim.mem.feature_dram_bytes();
    m.energy = energy_breakdown(sim, energy);
    if (baseline != nullptr && sim.total_cycles > 0) {
        m.baseline_name = baseline_name;
        m.speedup = static_cast<double>(baseline->total_cycles) /
                    static_cast<double>(sim.total_cycles);
    }
    return m;
}

CrossCheckReport cross_check(const AccessTrace& trace, const MemCounters& counters) {
    CrossCheckReport r;
    const uint64_t trace_total = trace.total_reads();
    const uint64_t sim_total = counters.feature_reads_total;
    if (trace_total != sim_total) {
        r.pass = false;
        r.detail = "feature read totals diverge: trace=" + std::to_string(trace_total) +
                   " sim=" + std::to_string(sim_total) + "; first divergence at index " +
                   std::to_string(std::min(trace_total, sim_total));
        return r;
    }
    const uint64_t trace_distinct = trace.distinct_vertices();
    if (trace_distinct != counters.feature_reads_distinct) {
        r.pass = false;
        r.detail = "distinct vertex counts diverge: trace=" + std::to_string(trace_distinct) +
                   " sim=" + std::to_string(counters.feature_reads_distinct);
        return r;
    }
    const double trace_red = redundancy_fraction(trace);
    const double sim_red =
        sim_total == 0 ? 0.0
                       : (static_cast<double>(sim_total) -
                          static_cast<double>(counters.feature_reads_distinct)) /
                             static_cast<double>(sim_total);
    if (trace_red != sim_red) {
        r.pass = false;
        r.detail = "redundancy fractions diverge";
        return r;
    }
    r.detail = "trace and counters agree: " + std::to_string(trace_total) + " reads, " +
               std::to_string(trace_distinct) + " distinct vertices";
    return r;
}

nlohmann::ordered_json MetricsBundle::to_json() const {
    nlohmann::ordered_json j;
    j["name"] = name;
    j["paradigm"] = paradigm;
    j["model_variant"] = model_variant;
    j["grouping"] = grouping;
    j["seed"] = seed;
    j["expansion_ratio"] = expansion_ratio;
    j["redundancy_fraction"] = redundancy_fraction;
    j["cycles"] = cycles;
    j["dram_bytes"] = dram_bytes;
    j["dram_transactions"] = dram_transactions;
    j["feature_dram_bytes"] = feature_dram_bytes;
    j["energy_pj"] = {{"dram", energy.dram_pj},
                      {"rpe", energy.rpe_pj},
                      {"caches_buffers", energy.caches_pj},
                      {"grouper", energy.grouper_pj},
                      {"total", energy.total_pj}};
    j["baseline"] = baseline_name;
    j["speedup"] = speedup;
    return j;
}

std::string MetricsBundle::csv_header() {
    return "name,paradigm,variant,grouping,seed,cycles,speedup,expansion_ratio,"
           "redundancy_fraction,dram_bytes,dram_transactions,feature_dram_bytes,"
           "energy_total_pj,energy_dram_pj,energy_rpe_pj,energy_caches_pj,energy_grouper_pj";
}

std::string MetricsBundle::csv_row() const {
    std::ostringstream os;
    os << name << ',' << paradigm << ',' << model_variant << ',' << grouping << ',' << seed << ','
       << cycles << ',' << speedup << ',' << expansion_ratio << ',' << redundancy_fraction << ','
       << dram_bytes << ',' << dram_transactions << ',' << feature_dram_bytes << ','
       << energy.total_pj << ',' << energy.dram_pj << ',' << energy.rpe_pj << ','
       << energy.caches_pj << ',' << energy.grouper_pj;
    return os.str();
}

}  // namespace hgsim
