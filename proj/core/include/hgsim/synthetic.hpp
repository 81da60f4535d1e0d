#pragma once

#include "hgsim/graph_io.hpp"

namespace hgsim {

// Discrete power law P(k) proportional to k^-alpha on [k_min, k_max].
struct PowerLawFanout {
    double alpha = 2.1;
    uint32_t k_min = 4;
    uint32_t k_max = 64;
};

// One generated relation. Sources are split into a shared region of
// round(sqrt(rho) * source_pool_size) vertices and a private remainder. Each
// target draws a fraction rho of its fanout as a contiguous window of the
// shared region and the rest uniformly from the private part. The window
// cursor advances by (1-rho)^2 * draw per target, so consecutive targets
// overlap more as rho grows; at rho = 1 with pool size == fanout every
// target sees the identical neighbor set, at rho = 0 draws never touch the
// shared region.
struct SyntheticRelationSpec {
    PowerLawFanout fanout;
    uint32_t source_pool_size = 1000;
    double overlap_rho = 0.5;
};

struct SyntheticSpec {
    uint64_t num_targets = 1000;
    std::vector<SyntheticRelationSpec> relations;
    uint32_t feature_dim = 64;  // d_in for every generated type
    uint64_t seed = 1;
    // With distinct sources every relation gets its own vertex type, so
    // semantics never share neighbors. Shared sources put all relations on
    // one source type with window cursors aligned across relations, giving
    // the cross-semantic neighborhood overlap large real graphs show; all
    // relations must then declare the same pool size.
    bool shared_sources = false;
};

LoadedGraph generate_synthetic(const SyntheticSpec& spec);

}  // namespace hgsim
