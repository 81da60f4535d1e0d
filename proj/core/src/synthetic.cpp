#include "hgsim/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace hgsim {
namespace {

void validate_spec(const SyntheticSpec& spec) {
    if (spec.num_targets == 0) throw ConfigError("synthetic: num_targets must be > 0");
    if (spec.relations.empty()) throw ConfigError("synthetic: at least one relation required");
    if (spec.feature_dim == 0) throw ConfigError("synthetic: feature_dim must be > 0");
    for (size_t r = 0; r < spec.relations.size(); ++r) {
        const auto& rel = spec.relations[r];
        const std::string at = "synthetic relation " + std::to_string(r) + ": ";
        if (!(rel.fanout.alpha > 1.0)) throw ConfigError(at + "power-law alpha must be > 1");
        if (rel.fanout.k_min == 0 || rel.fanout.k_min > rel.fanout.k_max)
            throw ConfigError(at + "fanout bounds invalid");
        if (rel.overlap_rho < 0.0 || rel.overlap_rho > 1.0)
            throw ConfigError(at + "overlap rho must be in [0, 1]");
        if (rel.source_pool_size == 0) throw ConfigError(at + "source pool must be > 0");
        if (spec.shared_sources &&
            rel.source_pool_size != spec.relations.front().source_pool_size)
            throw ConfigError(at + "shared sources require equal pool sizes");
    }
}

// Inverse-CDF sampler over the truncated discrete power law.
class FanoutSampler {
public:
    explicit FanoutSampler(const PowerLawFanout& f) : k_min_(f.k_min) {
        cdf_.reserve(f.k_max - f.k_min + 1);
        double acc = 0.0;
        for (uint32_t k = f.k_min; k <= f.k_max; ++k) {
            acc += std::pow(static_cast<double>(k), -f.alpha);
            cdf_.push_back(acc);
        }
        for (auto& c : cdf_) c /= acc;
    }

    uint32_t sample(Rng& rng) const {
        const double u = rng.uniform01();
        const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
        return k_min_ + static_cast<uint32_t>(it - cdf_.begin());
    }

private:
    uint32_t k_min_;
    std::vector<double> cdf_;
};

struct RelationDrawState {
    FanoutSampler fanouts;
    Rng rng;
    uint64_t pool = 0;
    uint64_t shared = 0;
    double rho = 0.0;
};

// One target's neighbor picks under one relation: a contiguous window of the
// shared region plus uniform picks from the private remainder. Returns the
// shared draw count, which drives the window slide.
uint64_t draw_neighbors(RelationDrawState& st, uint64_t cursor, std::set<VertexId>& picks) {
    picks.clear();
    const uint32_t k = st.fanouts.sample(st.rng);
    const uint64_t n_shared =
        std::min<uint64_t>(st.shared, static_cast<uint64_t>(std::llround(st.rho * k)));
    for (uint64_t i = 0; i < n_shared; ++i)
        picks.insert(static_cast<VertexId>((cursor + i) % st.shared));
    const uint64_t priv = st.pool - st.shared;
    const uint64_t n_priv = k > n_shared ? k - n_shared : 0;
    for (uint64_t i = 0; i < n_priv; ++i) {
        const VertexId id = priv > 0 ? static_cast<VertexId>(st.shared + st.rng.uniform_index(priv))
                                     : static_cast<VertexId>(st.rng.uniform_index(st.pool));
        picks.insert(id);  // duplicates collapse; neighbor lists are sets
    }
    return n_shared;
}

}  // namespace

LoadedGraph generate_synthetic(const SyntheticSpec& spec) {
    validate_spec(spec);

    HetGraph g;
    g.featseed = fnv1a_u64(spec.seed);
    g.vertex_types.push_back({"T", spec.num_targets, spec.feature_dim});
    g.target_type = 0;

    const size_t n_rel = spec.relations.size();
    std::vector<RelationDrawState> states;
    states.reserve(n_rel);
    for (size_t r = 0; r < n_rel; ++r) {
        const auto& rel = spec.relations[r];
        const uint64_t pool = rel.source_pool_size;
        const auto shared = static_cast<uint64_t>(
            std::llround(std::sqrt(rel.overlap_rho) * static_cast<double>(pool)));
        states.push_back({FanoutSampler(rel.fanout),
                          Rng(fnv1a_u64(r, fnv1a_u64(spec.seed, 0x9e3779b97f4a7c15ull))), pool,
                          shared, rel.overlap_rho});
        const VertexTypeId src_type = spec.shared_sources ? 1 : static_cast<VertexTypeId>(r + 1);
        if (!spec.shared_sources || r == 0)
            g.vertex_types.push_back(
                {spec.shared_sources ? "S" : "S" + std::to_string(r), pool, spec.feature_dim});
        g.relations.push_back({"R" + std::to_string(r), src_type, 0});
    }

    std::vector<RelationAdjacency> adj(n_rel);
    for (auto& a : adj) {
        a.offsets.reserve(spec.num_targets + 1);
        a.offsets.push_back(0);
    }

    // With shared sources a single cursor (advanced by relation 0's draw)
    // aligns the overlap windows of all semantics on the same vertices.
    std::vector<uint64_t> cursor(spec.shared_sources ? 1 : n_rel, 0);
    std::set<VertexId> picks;
    for (uint64_t v = 0; v < spec.num_targets; ++v) {
        for (size_t r = 0; r < n_rel; ++r) {
            auto& st = states[r];
            uint64_t& cur = cursor[spec.shared_sources ? 0 : r];
            const uint64_t n_shared = draw_neighbors(st, cur, picks);
            if (!spec.shared_sources || r == 0) {
                const double slide = (1.0 - st.rho) * (1.0 - st.rho);
                cur += static_cast<uint64_t>(std::llround(slide * static_cast<double>(n_shared)));
            }
            for (VertexId u : picks) adj[r].sources.push_back(u);
            adj[r].offsets.push_back(adj[r].sources.size());
        }
    }
    for (auto& a : adj) g.adjacency.push_back(std::move(a));

    FeatureStore store;
    for (const auto& t : g.vertex_types)
        store.raw.emplace_back(static_cast<uint32_t>(t.count), t.feature_dim);
    fill_default_features(g, store, {});

    g.validate();
    store.validate_against(g);
    return {std::move(g), std::move(store)};
}

}  // namespace hgsim
