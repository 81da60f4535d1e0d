#include "hgsim/het_graph.hpp"

#include <algorithm>
#include <cmath>

namespace hgsim {

const char* to_string(Stage s) {
    switch (s) {
        case Stage::FeatureProjection: return "fp";
        case Stage::NeighborAggregation: return "na";
        case Stage::SemanticFusion: return "sf";
    }
    return "?";
}

const char* to_string(AccessRole r) {
    return r == AccessRole::Target ? "target" : "neighbor";
}

uint64_t HetGraph::total_edges() const {
    uint64_t n = 0;
    for (const auto& adj : adjacency) n += adj.edge_count();
    return n;
}

uint64_t HetGraph::total_vertices() const {
    uint64_t n = 0;
    for (const auto& t : vertex_types) n += t.count;
    return n;
}

std::optional<VertexTypeId> HetGraph::find_vertex_type(const std::string& name) const {
    for (size_t i = 0; i < vertex_types.size(); ++i)
        if (vertex_types[i].name == name) return static_cast<VertexTypeId>(i);
    return std::nullopt;
}

std::optional<EdgeTypeId> HetGraph::find_relation(const std::string& name) const {
    for (size_t i = 0; i < relations.size(); ++i)
        if (relations[i].name == name) return static_cast<EdgeTypeId>(i);
    return std::nullopt;
}

uint64_t HetGraph::adjacency_bytes() const {
    uint64_t n = 0;
    for (const auto& adj : adjacency) {
        n += adj.offsets.size() * sizeof(uint64_t);
        n += adj.sources.size() * sizeof(VertexId);
    }
    return n;
}

void HetGraph::validate() const {
    if (vertex_types.empty()) throw ValidationError("graph has no vertex types");
    if (target_type >= vertex_types.size()) throw ValidationError("target type out of range");
    if (relations.size() != adjacency.size())
        throw ValidationError("relation table and adjacency size mismatch");
    for (size_t r = 0; r < relations.size(); ++r) {
        const auto& rel = relations[r];
        if (rel.src_type >= vertex_types.size() || rel.dst_type >= vertex_types.size())
            throw ValidationError("relation '" + rel.name + "' references unknown vertex type");
        const auto& adj = adjacency[r];
        const uint64_t n_dst = vertex_types[rel.dst_type].count;
        const uint64_t n_src = vertex_types[rel.src_type].count;
        if (adj.offsets.size() != n_dst + 1)
            throw ValidationError("relation '" + rel.name + "': offsets size mismatch");
        if (adj.offsets.front() != 0 || adj.offsets.back() != adj.sources.size())
            throw ValidationError("relation '" + rel.name + "': offsets do not cover sources");
        for (size_t i = 1; i < adj.offsets.size(); ++i)
            if (adj.offsets[i] < adj.offsets[i - 1])
                throw ValidationError("relation '" + rel.name + "': offsets not monotone");
        for (VertexId s : adj.sources)
            if (s >= n_src)
                throw ValidationError("relation '" + rel.name + "': source id " +
                                      std::to_string(s) + " out of range");
    }
}

uint64_t HetGraph::content_hash() const {
    uint64_t h = fnv1a_u64(vertex_types.size());
    for (const auto& t : vertex_types) {
        h = fnv1a(t.name.data(), t.name.size(), h);
        h = fnv1a_u64(t.count, h);
        h = fnv1a_u64(t.feature_dim, h);
    }
    for (const auto& r : relations) {
        h = fnv1a(r.name.data(), r.name.size(), h);
        h = fnv1a_u64((static_cast<uint64_t>(r.src_type) << 32) | r.dst_type, h);
    }
    for (const auto& adj : adjacency) {
        if (!adj.offsets.empty())
            h = fnv1a(adj.offsets.data(), adj.offsets.size() * sizeof(uint64_t), h);
        if (!adj.sources.empty())
            h = fnv1a(adj.sources.data(), adj.sources.size() * sizeof(VertexId), h);
    }
    h = fnv1a_u64(target_type, h);
    h = fnv1a_u64(featseed, h);
    return h;
}

uint64_t FeatureStore::raw_bytes() const {
    uint64_t n = 0;
    for (const auto& m : raw) n += m.bytes();
    return n;
}

void FeatureStore::validate_against(const HetGraph& g) const {
    if (raw.size() != g.vertex_types.size())
        throw ValidationError("feature store does not cover all vertex types");
    for (size_t t = 0; t < raw.size(); ++t) {
        if (raw[t].rows != g.vertex_types[t].count)
            throw ValidationError("feature rows mismatch for type '" + g.vertex_types[t].name + "'");
        if (raw[t].cols != g.vertex_types[t].feature_dim)
            throw ValidationError("feature dim mismatch for type '" + g.vertex_types[t].name + "'");
        for (float f : raw[t].data)
            if (!std::isfinite(f))
                throw ValidationError("non-finite feature for type '" + g.vertex_types[t].name + "'");
    }
}

uint64_t FeatureStore::content_hash() const {
    uint64_t h = fnv1a_u64(raw.size());
    for (const auto& m : raw) h = fnv1a_u64(m.content_hash(), h);
    return h;
}

void fill_default_features(const HetGraph& g, FeatureStore& store,
                           const std::vector<bool>& has_explicit) {
    for (size_t t = 0; t < g.vertex_types.size(); ++t) {
        if (t < has_explicit.size() && has_explicit[t]) continue;
        Rng rng(fnv1a_u64(t, fnv1a_u64(g.featseed)));
        auto& m = store.raw[t];
        for (auto& f : m.data) f = rng.uniform_f32(-1.0f, 1.0f);
    }
}

uint64_t SemanticGraphSet::total_edges() const {
    uint64_t n = 0;
    for (const auto& adj : neighbors) n += adj.edge_count();
    return n;
}

SemanticGraphSet build_semantic_graphs(const HetGraph& g, VertexTypeId target_type) {
    if (target_type >= g.vertex_types.size())
        throw ValidationError("build_semantic_graphs: unknown target type");
    SemanticGraphSet out;
    out.target_type = target_type;
    out.target_count = g.vertex_types[target_type].count;
    for (size_t r = 0; r < g.relations.size(); ++r) {
        if (g.relations[r].dst_type != target_type) continue;
        out.relation_ids.push_back(static_cast<EdgeTypeId>(r));
        out.source_types.push_back(g.relations[r].src_type);
        out.neighbors.push_back(g.adjacency[r]);  // already deduplicated at load
    }
    if (out.relation_ids.empty())
        throw ValidationError("no relation terminates at target type '" +
                              g.vertex_types[target_type].name + "'");
    return out;
}

std::vector<bool> participating_types(const HetGraph& g, const SemanticGraphSet& sems) {
    std::vector<bool> part(g.vertex_types.size(), false);
    part[sems.target_type] = true;
    for (VertexTypeId t : sems.source_types) part[t] = true;
    return part;
}

}  // namespace hgsim
