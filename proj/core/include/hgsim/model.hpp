#pragma once

#include "hgsim/het_graph.hpp"

namespace hgsim {

enum class ModelVariant : uint8_t { RgcnLike = 0, RgatLike = 1 };
enum class Activation : uint8_t { Relu = 0, LeakyRelu = 1 };

const char* to_string(ModelVariant v);

struct ModelConfig {
    ModelVariant variant = ModelVariant::RgcnLike;
    uint32_t d_hid = 64;
    uint32_t d_out = 64;  // must equal d_hid: SemanticFuse is a plain weighted sum
    Activation activation = Activation::Relu;
    float leaky_slope = 0.01f;
    std::vector<float> beta;  // per relation fusion weight; empty means all 1
    uint64_t seed = 1;

    float beta_for(size_t relation_index) const {
        return relation_index < beta.size() ? beta[relation_index] : 1.0f;
    }
    void validate() const;
};

// Materialized parameters: one projection matrix per vertex type
// (feature_dim x d_hid) and, for the attention variant, one vector of length
// 2*d_hid per relation. Initialization is uniform in [-1/sqrt(fan_in),
// 1/sqrt(fan_in)] from the model seed.
struct ModelParams {
    std::vector<MatrixF32> type_weights;
    std::vector<std::vector<float>> attention;  // indexed by relation id
    uint64_t weight_bytes() const;
    uint64_t attention_bytes() const;
};

ModelParams init_model_params(const HetGraph& g, const ModelConfig& cfg);

float apply_activation(float x, const ModelConfig& cfg);

// Unnormalized attention score for edge u -> v under `relation`.
// RGCN-like models weight every edge 1; RGAT-like models score
// leaky_relu(a_r . [h'_u | h'_v]).
float compute_edge_weight(std::span<const float> h_u, std::span<const float> h_v,
                          EdgeTypeId relation, const ModelParams& params, const ModelConfig& cfg);

}  // namespace hgsim
