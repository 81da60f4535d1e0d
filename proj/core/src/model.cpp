#include "hgsim/model.hpp"

#include <cmath>

namespace hgsim {

const char* to_string(ModelVariant v) {
    return v == ModelVariant::RgcnLike ? "rgcn-like" : "rgat-like";
}

void ModelConfig::validate() const {
    if (d_hid == 0) throw ConfigError("model: d_hid must be > 0");
    if (d_out != d_hid)
        throw ConfigError("model: d_out must equal d_hid (fusion is a weighted sum of "
                          "d_hid-wide per-relation vectors)");
    if (activation == Activation::LeakyRelu && !(leaky_slope > 0.0f))
        throw ConfigError("model: leaky-relu slope must be > 0");
    for (float b : beta)
        if (!std::isfinite(b)) throw ConfigError("model: non-finite fusion weight");
}

uint64_t ModelParams::weight_bytes() const {
    uint64_t n = 0;
    for (const auto& w : type_weights) n += w.bytes();
    return n;
}

uint64_t ModelParams::attention_bytes() const {
    uint64_t n = 0;
    for (const auto& a : attention) n += a.size() * sizeof(float);
    return n;
}

ModelParams init_model_params(const HetGraph& g, const ModelConfig& cfg) {
    cfg.validate();
    ModelParams params;
    Rng rng(fnv1a_u64(cfg.seed, 0x5851f42d4c957f2dull));
    for (const auto& t : g.vertex_types) {
        MatrixF32 w(t.feature_dim, cfg.d_hid);
        const float bound = 1.0f / std::sqrt(static_cast<float>(std::max(1u, t.feature_dim)));
        for (auto& x : w.data) x = rng.uniform_f32(-bound, bound);
        params.type_weights.push_back(std::move(w));
    }
    if (cfg.variant == ModelVariant::RgatLike) {
        const float bound = 1.0f / std::sqrt(static_cast<float>(2 * cfg.d_hid));
        for (size_t r = 0; r < g.relations.size(); ++r) {
            std::vector<float> a(2 * cfg.d_hid);
            for (auto& x : a) x = rng.uniform_f32(-bound, bound);
            params.attention.push_back(std::move(a));
        }
    }
    return params;
}

float apply_activation(float x, const ModelConfig& cfg) {
    if (cfg.activation == Activation::Relu) return x > 0.0f ? x : 0.0f;
    return x > 0.0f ? x : cfg.leaky_slope * x;
}

float compute_edge_weight(std::span<const float> h_u, std::span<const float> h_v,
                          EdgeTypeId relation, const ModelParams& params, const ModelConfig& cfg) {
    if (cfg.variant == ModelVariant::RgcnLike) return 1.0f;
    const auto& a = params.attention[relation];
    float s = 0.0f;
    for (size_t i = 0; i < h_u.size(); ++i) s += a[i] * h_u[i];
    for (size_t i = 0; i < h_v.size(); ++i) s += a[h_u.size() + i] * h_v[i];
    return s > 0.0f ? s : cfg.leaky_slope * s;
}

}  // namespace hgsim
