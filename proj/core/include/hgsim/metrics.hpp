#pragma once

#include "hgsim/accel_sim.hpp"

namespace hgsim {

struct EnergyBreakdown {
    double dram_pj = 0.0;
    double rpe_pj = 0.0;
    double caches_pj = 0.0;
    double grouper_pj = 0.0;
    double total_pj = 0.0;
};

EnergyBreakdown energy_breakdown(const SimReport& sim, const EnergyConfig& cfg);

struct MetricsBundle {
    std::string name;
    std::string paradigm;
    std::string model_variant;
    std::string grouping;
    uint64_t seed = 0;

    double expansion_ratio = 0.0;
    double redundancy_fraction = 0.0;
    uint64_t cycles = 0;
    uint64_t dram_bytes = 0;
    uint64_t dram_transactions = 0;
    uint64_t feature_dram_bytes = 0;
    EnergyBreakdown energy;
    std::string baseline_name;
    double speedup = 1.0;

    nlohmann::ordered_json to_json() const;
    static std::string csv_header();
    std::string csv_row() const;
};

struct RunLabel {
    std::string name;
    std::string grouping;
    uint64_t seed = 0;
};

// Merges the functional-engine metrics with the simulator counters for one
// run. Both sides must carry the same fingerprint. Speedup is the baseline's
// cycle count over this run's (1.0 against itself or without a baseline).
MetricsBundle consolidate(const FunctionalResult& functional, const HetGraph& g,
                          const FeatureStore& features, const SimReport& sim,
                          const EnergyConfig& energy, const RunLabel& label,
                          const SimReport* baseline = nullptr,
                          const std::string& baseline_name = "");

struct CrossCheckReport {
    bool pass = true;
    std::string detail;
};

// The simulator is driven by the same iteration order as the functional
// engine, so logical feature reads must agree one for one: equal totals,
// equal distinct vertex counts, equal redundancy.
CrossCheckReport cross_check(const AccessTrace& trace, const MemCounters& counters);

}  // namespace hgsim
