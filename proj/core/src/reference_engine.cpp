#include "hgsim/reference_engine.hpp"

#include <cmath>

namespace hgsim {
namespace {

RunFingerprint make_fingerprint(const HetGraph& g, const FeatureStore& store,
                                const ModelParams& params, const ModelConfig& cfg,
                                std::span<const VertexId> order) {
    return {g.content_hash(), store.content_hash(), model_hash(params, cfg), order_hash(order)};
}

void check_order(const SemanticGraphSet& sems, std::span<const VertexId> order) {
    std::vector<bool> seen(sems.target_count, false);
    if (order.size() != sems.target_count)
        throw ValidationError("vertex order is not a permutation of the targets");
    for (VertexId v : order) {
        if (v >= sems.target_count || seen[v])
            throw ValidationError("vertex order is not a permutation of the targets");
        seen[v] = true;
    }
}

void fuse(const ModelConfig& cfg, const std::vector<std::span<const float>>& per_relation,
          std::span<float> z) {
    for (auto& x : z) x = 0.0f;
    for (size_t ri = 0; ri < per_relation.size(); ++ri) {
        const float beta = cfg.beta_for(ri);
        const auto row = per_relation[ri];
        for (size_t d = 0; d < z.size(); ++d) z[d] += beta * row[d];
    }
    for (auto& x : z) x = apply_activation(x, cfg);
}

}  // namespace

const char* to_string(Paradigm p) {
    return p == Paradigm::PerSemantic ? "per-semantic" : "semantics-complete";
}

uint64_t model_hash(const ModelParams& params, const ModelConfig& cfg) {
    uint64_t h = fnv1a_u64(static_cast<uint64_t>(cfg.variant));
    h = fnv1a_u64(cfg.d_hid, h);
    h = fnv1a_u64(static_cast<uint64_t>(cfg.activation), h);
    h = fnv1a(&cfg.leaky_slope, sizeof(float), h);
    if (!cfg.beta.empty()) h = fnv1a(cfg.beta.data(), cfg.beta.size() * sizeof(float), h);
    h = fnv1a_u64(cfg.seed, h);
    for (const auto& w : params.type_weights) h = fnv1a_u64(w.content_hash(), h);
    for (const auto& a : params.attention)
        h = fnv1a(a.data(), a.size() * sizeof(float), h);
    return h;
}

uint64_t order_hash(std::span<const VertexId> order) {
    if (order.empty()) return fnv1a_u64(0);
    return fnv1a(order.data(), order.size() * sizeof(VertexId));
}

std::vector<VertexId> identity_order(uint64_t n_targets) {
    std::vector<VertexId> order(n_targets);
    for (uint64_t i = 0; i < n_targets; ++i) order[i] = static_cast<VertexId>(i);
    return order;
}

void feature_projection(const HetGraph& g, const SemanticGraphSet& sems, FeatureStore& store,
                        const ModelParams& params, const ModelConfig& cfg,
                        IntermediateLedger& ledger, AccessTrace& trace) {
    const auto part = participating_types(g, sems);
    store.projected.assign(g.vertex_types.size(), MatrixF32{});

    uint64_t projected_bytes = 0;
    for (size_t t = 0; t < g.vertex_types.size(); ++t)
        if (part[t]) projected_bytes += g.vertex_types[t].count * cfg.d_hid * sizeof(float);
    ledger.alloc(LedgerRole::ProjectedFeatures, projected_bytes);

    for (size_t t = 0; t < g.vertex_types.size(); ++t) {
        if (!part[t]) continue;
        const auto& x = store.raw[t];
        const auto& w = params.type_weights[t];
        auto& h = store.projected[t];
        h = MatrixF32(x.rows, cfg.d_hid);
        const auto role = t == sems.target_type ? AccessRole::Target : AccessRole::Neighbor;
        for (uint32_t v = 0; v < x.rows; ++v) {
            trace.log({static_cast<VertexTypeId>(t), v}, role, kNoRelation,
                      Stage::FeatureProjection);
            const auto xin = x.row(v);
            auto out = h.row(v);
            for (uint32_t i = 0; i < x.cols; ++i) {
                const float xi = xin[i];
                const auto wrow = w.row(i);
                for (uint32_t j = 0; j < cfg.d_hid; ++j) out[j] += xi * wrow[j];
            }
            for (float f : out)
                if (!std::isfinite(f))
                    throw NumericError("non-finite projection for vertex (" +
                                       g.vertex_types[t].name + ", " + std::to_string(v) + ")");
        }
    }
}

void aggregate_one(const SemanticGraphSet& sems, size_t relation_index, VertexId v,
                   const FeatureStore& store, const ModelParams& params, const ModelConfig& cfg,
                   IntermediateLedger& ledger, AccessTrace& trace, std::span<float> out) {
    const EdgeTypeId rel = sems.relation_ids[relation_index];
    const VertexTypeId src_type = sems.source_types[relation_index];
    const auto neigh = sems.neighbors[relation_index].neighbors(v);
    const auto h_v = store.projected[sems.target_type].row(v);
    const auto& h_src = store.projected[src_type];

    for (VertexId u : neigh)
        trace.log({src_type, u}, AccessRole::Neighbor, rel, Stage::NeighborAggregation);

    if (neigh.empty()) {  // pure self term, Algorithm-style initialization
        for (size_t d = 0; d < out.size(); ++d) out[d] = h_v[d];
        return;
    }

    if (cfg.variant == ModelVariant::RgcnLike) {
        const float inv = 1.0f / static_cast<float>(1 + neigh.size());
        for (size_t d = 0; d < out.size(); ++d) out[d] = h_v[d];
        for (VertexId u : neigh) {
            const auto h_u = h_src.row(u);
            for (size_t d = 0; d < out.size(); ++d) out[d] += h_u[d];
        }
        for (size_t d = 0; d < out.size(); ++d) out[d] *= inv;
        return;
    }

    // rgat-like: softmax over the self score and one score per neighbor,
    // buffered for a two-pass normalization local to this workload.
    const size_t n_scores = neigh.size() + 1;
    ledger.alloc(LedgerRole::Scratch, n_scores * sizeof(float));
    std::vector<float> scores(n_scores);
    scores[0] = compute_edge_weight(h_v, h_v, rel, params, cfg);
    for (size_t i = 0; i < neigh.size(); ++i)
        scores[i + 1] = compute_edge_weight(h_src.row(neigh[i]), h_v, rel, params, cfg);

    float max_s = scores[0];
    for (float s : scores) max_s = std::max(max_s, s);
    float denom = 0.0f;
    for (auto& s : scores) {
        s = std::exp(s - max_s);
        denom += s;
    }
    const float inv_denom = 1.0f / denom;

    const float alpha_self = scores[0] * inv_denom;
    for (size_t d = 0; d < out.size(); ++d) out[d] = alpha_self * h_v[d];
    for (size_t i = 0; i < neigh.size(); ++i) {
        const float alpha = scores[i + 1] * inv_denom;
        const auto h_u = h_src.row(neigh[i]);
        for (size_t d = 0; d < out.size(); ++d) out[d] += alpha * h_u[d];
    }
    ledger.free(LedgerRole::Scratch, n_scores * sizeof(float));
}

FunctionalResult run_per_semantic(const HetGraph& g, const SemanticGraphSet& sems,
                                  FeatureStore& store, const ModelParams& params,
                                  const ModelConfig& cfg, std::span<const VertexId> order) {
    if (sems.relation_count() == 0)
        throw ValidationError("run_per_semantic: no semantics to aggregate");
    std::vector<VertexId> default_order;
    if (order.empty()) {
        default_order = identity_order(sems.target_count);
        order = default_order;
    }
    check_order(sems, order);

    FunctionalResult res;
    res.paradigm = Paradigm::PerSemantic;
    feature_projection(g, sems, store, params, cfg, res.ledger, res.trace);

    const size_t n_rel = sems.relation_count();
    const auto n_targets = static_cast<uint32_t>(sems.target_count);
    const uint64_t mat_bytes = static_cast<uint64_t>(n_targets) * cfg.d_hid * sizeof(float);

    // One full n_target x d_hid intermediate per relation, all live at once.
    std::vector<MatrixF32> intermediates;
    intermediates.reserve(n_rel);
    for (size_t ri = 0; ri < n_rel; ++ri) {
        res.ledger.alloc(LedgerRole::NaIntermediate, mat_bytes);
        intermediates.emplace_back(n_targets, cfg.d_hid);
    }

    for (size_t ri = 0; ri < n_rel; ++ri) {
        for (VertexId v : order) {
            if (sems.neighbors[ri].neighbors(v).empty()) continue;  // filled at fusion
            res.trace.log({sems.target_type, v}, AccessRole::Target, sems.relation_ids[ri],
                          Stage::NeighborAggregation);
            aggregate_one(sems, ri, v, store, params, cfg, res.ledger, res.trace,
                          intermediates[ri].row(v));
        }
    }

    res.ledger.alloc(LedgerRole::OutputEmbeddings,
                     static_cast<uint64_t>(n_targets) * cfg.d_hid * sizeof(float));
    res.embeddings = MatrixF32(n_targets, cfg.d_hid);
    std::vector<std::span<const float>> rows(n_rel);
    for (VertexId v : order) {
        for (size_t ri = 0; ri < n_rel; ++ri) {
            if (sems.neighbors[ri].neighbors(v).empty()) {
                // The relation produced no stored row; fusion falls back to the
                // target's own projection, read here.
                res.trace.log({sems.target_type, v}, AccessRole::Target, sems.relation_ids[ri],
                              Stage::SemanticFusion);
                rows[ri] = store.projected[sems.target_type].row(v);
            } else {
                rows[ri] = intermediates[ri].row(v);
            }
        }
        fuse(cfg, rows, res.embeddings.row(v));
    }

    for (size_t ri = 0; ri < n_rel; ++ri) res.ledger.free(LedgerRole::NaIntermediate, mat_bytes);
    res.ledger.free(LedgerRole::OutputEmbeddings,
                    static_cast<uint64_t>(n_targets) * cfg.d_hid * sizeof(float));
    res.ledger.free(LedgerRole::ProjectedFeatures,
                    res.ledger.running_bytes(LedgerRole::ProjectedFeatures));
    res.ledger.check_balanced();
    res.fingerprint = make_fingerprint(g, store, params, cfg, order);
    return res;
}

FunctionalResult run_semantics_complete(const HetGraph& g, const SemanticGraphSet& sems,
                                        FeatureStore& store, const ModelParams& params,
                                        const ModelConfig& cfg,
                                        std::span<const VertexId> vertex_order) {
    if (sems.relation_count() == 0)
        throw ValidationError("run_semantics_complete: no semantics to aggregate");
    check_order(sems, vertex_order);

    FunctionalResult res;
    res.paradigm = Paradigm::SemanticsComplete;
    feature_projection(g, sems, store, params, cfg, res.ledger, res.trace);

    const size_t n_rel = sems.relation_count();
    const auto n_targets = static_cast<uint32_t>(sems.target_count);
    res.ledger.alloc(LedgerRole::OutputEmbeddings,
                     static_cast<uint64_t>(n_targets) * cfg.d_hid * sizeof(float));
    res.embeddings = MatrixF32(n_targets, cfg.d_hid);

    const uint64_t vertex_buf_bytes = static_cast<uint64_t>(n_rel) * cfg.d_hid * sizeof(float);
    MatrixF32 h_buf(static_cast<uint32_t>(n_rel), cfg.d_hid);
    std::vector<std::span<const float>> rows(n_rel);

    for (VertexId v : vertex_order) {
        res.ledger.alloc(LedgerRole::NaIntermediate, vertex_buf_bytes);
        // The target's projection is fetched once and reused across all
        // semantics of this workload.
        res.trace.log({sems.target_type, v}, AccessRole::Target, kNoRelation,
                      Stage::NeighborAggregation);
        for (size_t ri = 0; ri < n_rel; ++ri) {
            aggregate_one(sems, ri, v, store, params, cfg, res.ledger, res.trace, h_buf.row(ri));
            rows[ri] = h_buf.row(ri);
        }
        fuse(cfg, rows, res.embeddings.row(v));
        res.ledger.free(LedgerRole::NaIntermediate, vertex_buf_bytes);
    }

    res.ledger.free(LedgerRole::OutputEmbeddings,
                    static_cast<uint64_t>(n_targets) * cfg.d_hid * sizeof(float));
    res.ledger.free(LedgerRole::ProjectedFeatures,
                    res.ledger.running_bytes(LedgerRole::ProjectedFeatures));
    res.ledger.check_balanced();
    res.fingerprint = make_fingerprint(g, store, params, cfg, vertex_order);
    return res;
}

double expansion_ratio(const IntermediateLedger& ledger, const HetGraph& g,
                       const FeatureStore& features) {
    const uint64_t initial = features.raw_bytes() + g.adjacency_bytes();
    if (initial == 0)
        throw UndefinedMetricError("expansion_ratio: zero initial memory footprint");
    return (static_cast<double>(initial) + static_cast<double>(ledger.peak_bytes())) /
           static_cast<double>(initial);
}

}  // namespace hgsim
