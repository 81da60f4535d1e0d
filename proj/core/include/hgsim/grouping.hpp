#pragma once

#include "hgsim/het_graph.hpp"

namespace hgsim {

// A target vertex's full aggregation workload: the vertex itself plus its
// neighbors across all semantics, as a deduplicated sorted set.
struct SuperVertex {
    VertexId target = 0;
    std::vector<VertexRef> neighborhood;

    size_t workload_size() const { return neighborhood.size(); }
};

SuperVertex build_super_vertex(const SemanticGraphSet& sems, VertexId v);

// |A n B| / |A u B| over the neighborhoods (selves included).
double jaccard(const SuperVertex& a, const SuperVertex& b);

struct HypergraphConfig {
    double delta = 0.15;  // fraction of targets modeled, largest workloads first
    // Cap on weighted edges attached per super vertex; 0 = unlimited. Hub
    // neighbors otherwise induce a quadratic number of candidate pairs.
    uint32_t max_edges_per_super = 0;
};

struct OverlapHypergraph {
    struct Edge {
        uint32_t a = 0, b = 0;  // indices into supers, a < b
        double weight = 0.0;
    };

    std::vector<SuperVertex> supers;  // the selected high-degree targets
    std::vector<Edge> edges;
    std::vector<std::vector<std::pair<uint32_t, double>>> adjacency;  // per super
    std::vector<double> degree;                                       // k_i
    double total_weight = 0.0;                                        // m

    void dump_csv(std::ostream& out) const;  // i,j,w
};

// Builds the weighted overlap hypergraph over the top-delta fraction of
// targets by workload size (ties to the lower id), using an inverted
// neighbor index so each co-occurring pair is scored exactly once.
OverlapHypergraph build_hypergraph(const SemanticGraphSet& sems, double delta);
OverlapHypergraph build_hypergraph(const SemanticGraphSet& sems, const HypergraphConfig& cfg);

// Louvain isolated-node insertion gain for adding super vertex `v` to the
// community holding `community` (indices into h.supers):
//   dQ = k_in / m - (sum_tot * k_v) / (2 m^2)
// Zero when the hypergraph has no edges.
double modularity_gain(const OverlapHypergraph& h, uint32_t v, std::span<const uint32_t> community);

struct GroupPlan {
    struct Group {
        std::vector<VertexId> members;
        uint32_t release_index = 0;
        uint32_t channel = 0;
        // Grouper trace steps consumed when this group was emitted; groups
        // from trivial strategies carry 0.
        size_t trace_end = 0;
    };

    std::vector<Group> groups;
    uint32_t n_max = 0;
    uint64_t n_targets = 0;
    // Frontier size of every modularity-evaluation round, in order. The
    // final round of a group (the one that fails to adopt) is included;
    // rounds with an empty frontier cost nothing and are not recorded.
    std::vector<uint32_t> frontier_trace;
    // Precomputed overlap weights the hardware grouper loads; zero for the
    // trivial strategies.
    uint64_t hypergraph_bytes = 0;

    void validate() const;  // partition of 0..n_targets-1, all groups <= n_max
    std::vector<VertexId> flatten() const;
    uint64_t content_hash() const;
    void dump_csv(std::ostream& out) const;  // group_id,release_index,channel,member_ids...
};

uint32_t group_size_cap(uint64_t n_targets, uint32_t n_channels);

// Algorithm: repeatedly seed a group with the first unvisited super in a
// seed-shuffled order, then greedily adopt the frontier vertex with the
// largest positive modularity gain (ties to the lower target id) until the
// gain is non-positive or the group hits the size cap. Completed groups are
// released immediately; targets outside the hypergraph are appended
// afterwards in sequential chunks.
GroupPlan group_overlap_driven(const OverlapHypergraph& h, uint64_t n_targets,
                               uint32_t n_channels, uint64_t seed);

GroupPlan group_random(uint64_t n_targets, uint32_t n_channels, uint64_t seed);
GroupPlan group_sequential(uint64_t n_targets, uint32_t n_channels);

struct GrouperHwConfig {
    uint32_t n_mac = 512;  // MAC units in the modularity calculator
    uint32_t c_update = 2; // table-update cycles per round
};

// cycles = sum over rounds of ceil(frontier / n_mac) + ceil(log2(max(frontier, 2))) + c_update
uint64_t grouper_cost(std::span<const uint32_t> frontier_trace, const GrouperHwConfig& hw);

// Mean pairwise Jaccard within groups / between consecutive targets;
// diagnostics for generator and grouping quality.
double mean_intra_group_jaccard(const SemanticGraphSet& sems, const GroupPlan& plan);
double mean_consecutive_jaccard(const SemanticGraphSet& sems);

}  // namespace hgsim
