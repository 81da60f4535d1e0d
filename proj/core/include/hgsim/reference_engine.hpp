#pragma once

#include "hgsim/access_trace.hpp"
#include "hgsim/ledger.hpp"
#include "hgsim/model.hpp"

namespace hgsim {

enum class Paradigm : uint8_t { PerSemantic = 0, SemanticsComplete = 1 };
const char* to_string(Paradigm p);

// Identifies the (graph, features, model, vertex order) tuple a result was
// produced from, so reports from different runs are never merged by accident.
struct RunFingerprint {
    uint64_t graph_hash = 0;
    uint64_t feature_hash = 0;
    uint64_t model_hash = 0;
    uint64_t order_hash = 0;

    friend bool operator==(const RunFingerprint&, const RunFingerprint&) = default;
};

uint64_t model_hash(const ModelParams& params, const ModelConfig& cfg);
uint64_t order_hash(std::span<const VertexId> order);
std::vector<VertexId> identity_order(uint64_t n_targets);

struct FunctionalResult {
    MatrixF32 embeddings;  // target_count x d_hid
    IntermediateLedger ledger;
    AccessTrace trace;
    Paradigm paradigm = Paradigm::PerSemantic;
    RunFingerprint fingerprint;
};

// FP stage: h'_v = x_v . W_{T_v} for every vertex of the target type and of
// every source type of an included relation. Fills store.projected; raw
// feature reads and the projected-buffer allocation are logged.
void feature_projection(const HetGraph& g, const SemanticGraphSet& sems, FeatureStore& store,
                        const ModelParams& params, const ModelConfig& cfg,
                        IntermediateLedger& ledger, AccessTrace& trace);

// h_v^r for one (target, relation) workload. The target's own projection
// participates as an extra aggregand: mean over {v} u N_v^r for rgcn-like,
// softmax over the self score plus neighbor scores for rgat-like. Neighbor
// reads are logged; the target read is the caller's responsibility since the
// two paradigms account for it differently.
void aggregate_one(const SemanticGraphSet& sems, size_t relation_index, VertexId v,
                   const FeatureStore& store, const ModelParams& params, const ModelConfig& cfg,
                   IntermediateLedger& ledger, AccessTrace& trace, std::span<float> out);

// Conventional paradigm: one pass per relation over all targets, all
// per-relation intermediate matrices live simultaneously until fusion.
// `order` permutes the per-pass target iteration (default: id order); it has
// no effect on the embeddings.
FunctionalResult run_per_semantic(const HetGraph& g, const SemanticGraphSet& sems,
                                  FeatureStore& store, const ModelParams& params,
                                  const ModelConfig& cfg, std::span<const VertexId> order = {});

// Vertex-centric paradigm: each target's neighbors across all semantics are
// one workload, fused immediately; per-vertex intermediates are freed after
// the vertex's fusion and each target feature is read exactly once.
FunctionalResult run_semantics_complete(const HetGraph& g, const SemanticGraphSet& sems,
                                        FeatureStore& store, const ModelParams& params,
                                        const ModelConfig& cfg,
                                        std::span<const VertexId> vertex_order);

// (initial footprint + peak live intermediate bytes) / initial footprint,
// where the initial footprint is raw feature bytes + adjacency bytes.
double expansion_ratio(const IntermediateLedger& ledger, const HetGraph& g,
                       const FeatureStore& features);

}  // namespace hgsim
