#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hgsim/types.hpp"

namespace hgsim {

struct VertexTypeInfo {
    std::string name;
    uint64_t count = 0;
    uint32_t feature_dim = 0;
};

struct RelationInfo {
    std::string name;
    VertexTypeId src_type = 0;
    VertexTypeId dst_type = 0;
};

// Per-relation adjacency, compressed by destination vertex: sources(v) lists
// the deduplicated, sorted source ids of edges ending at v.
struct RelationAdjacency {
    std::vector<uint64_t> offsets;  // size = dst count + 1, monotone
    std::vector<VertexId> sources;

    std::span<const VertexId> neighbors(VertexId dst) const {
        return {sources.data() + offsets[dst], sources.data() + offsets[dst + 1]};
    }
    uint64_t edge_count() const { return sources.size(); }
};

struct HetGraph {
    std::vector<VertexTypeInfo> vertex_types;
    std::vector<RelationInfo> relations;
    std::vector<RelationAdjacency> adjacency;  // one per relation, keyed by dst
    VertexTypeId target_type = 0;
    uint64_t featseed = 0;  // stream seed for vertex types without explicit features

    uint64_t vertex_count(VertexTypeId t) const { return vertex_types[t].count; }
    uint64_t target_count() const { return vertex_types[target_type].count; }
    uint64_t total_edges() const;
    uint64_t total_vertices() const;

    // Heterogeneous iff |vertex types| + |edge types| > 2.
    bool is_heterogeneous() const { return vertex_types.size() + relations.size() > 2; }

    std::optional<VertexTypeId> find_vertex_type(const std::string& name) const;
    std::optional<EdgeTypeId> find_relation(const std::string& name) const;

    // Bytes of the graph structure as stored: CSR offsets + source ids.
    uint64_t adjacency_bytes() const;

    void validate() const;  // throws ValidationError
    uint64_t content_hash() const;
};

// Dense Float32 feature state: raw inputs per vertex type, projected vectors
// filled during FP, and the final target embeddings.
struct FeatureStore {
    std::vector<MatrixF32> raw;        // one matrix per vertex type, count x feature_dim
    std::vector<MatrixF32> projected;  // filled by the engine, count x d_hid
    MatrixF32 embeddings;              // target_count x d_out

    uint64_t raw_bytes() const;
    void validate_against(const HetGraph& g) const;
    uint64_t content_hash() const;
};

// Fill features for types that have no explicit rows: uniform [-1, 1) from a
// per-type stream derived from the graph's featseed.
void fill_default_features(const HetGraph& g, FeatureStore& store,
                           const std::vector<bool>& has_explicit);

// Semantic graphs for one target type: the per-relation neighbor lists
// N_v^r restricted to relations that terminate at that type.
struct SemanticGraphSet {
    VertexTypeId target_type = 0;
    std::vector<EdgeTypeId> relation_ids;        // indices into HetGraph::relations
    std::vector<RelationAdjacency> neighbors;    // parallel to relation_ids
    std::vector<VertexTypeId> source_types;      // parallel to relation_ids

    size_t relation_count() const { return relation_ids.size(); }
    uint64_t target_count = 0;
    uint64_t total_edges() const;
};

// SGB stage: partition the graph into per-relation semantic graphs.
// Relations whose destination is not target_type are excluded.
SemanticGraphSet build_semantic_graphs(const HetGraph& g, VertexTypeId target_type);

// Types touched by an inference run: the target type plus every source type
// of an included relation. Only these are projected and fetched.
std::vector<bool> participating_types(const HetGraph& g, const SemanticGraphSet& sems);

}  // namespace hgsim
