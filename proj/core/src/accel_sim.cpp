#include "hgsim/accel_sim.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>

namespace hgsim {

void HwConfig::validate() const {
    rpe.validate();
    if (channels.n_channels == 0) throw ConfigError("hw: channel count must be >= 1");
    if (channels.rpes_per_channel == 0) throw ConfigError("hw: rpes per channel must be >= 1");
    if (channels.agg_fraction_rgat <= 0.0 || channels.agg_fraction_rgat > 1.0)
        throw ConfigError("hw: aggregation-mode fraction must be in (0, 1]");
    if (fetch_issue_per_cycle == 0) throw ConfigError("hw: fetch issue rate must be >= 1");
    if (activation_width == 0) throw ConfigError("hw: activation width must be >= 1");
    if (hbm.max_outstanding_misses == 0) throw ConfigError("hw: miss window must be >= 1");
}

uint64_t rpe_linear_cycles(uint64_t k, uint64_t m, const RpeConfig& cfg) {
    if (k == 0 || m == 0) return 0;
    return m * ceil_div(k, cfg.first_layer_units) + cfg.tree_depth();
}

uint64_t rpe_aggregation_cycles(uint64_t n, uint64_t d, const RpeConfig& cfg) {
    if (n == 0 || d == 0) return 0;
    const uint64_t per_pass = 2ull * cfg.first_layer_units;
    const uint64_t passes = ceil_div(n, per_pass);
    const uint64_t in_last_pass = n - (passes - 1) * per_pass;
    const uint64_t odd = in_last_pass % 2;
    return d * passes + cfg.tree_depth() + 3 * odd;
}

namespace {

// Min-heap over (free_cycle, unit id); earliest-free unit wins, lowest id on
// ties, so dispatch is deterministic.
class UnitPool {
public:
    UnitPool(uint32_t count, uint32_t id_base) {
        for (uint32_t i = 0; i < count; ++i) heap_.push({0, id_base + i});
    }

    bool empty() const { return heap_.empty(); }

    struct Slot {
        uint64_t start, end;
        uint32_t unit;
    };

    Slot schedule(uint64_t ready, uint64_t duration) {
        auto [free, unit] = heap_.top();
        heap_.pop();
        const uint64_t start = std::max(free, ready);
        const uint64_t end = start + duration;
        heap_.push({end, unit});
        return {start, end, unit};
    }

private:
    using Item = std::pair<uint64_t, uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap_;
};

struct ChannelState {
    std::vector<UnitPool> pools;  // [0]=agg, [1]=linear (NA phase layout)
    uint64_t fetch_slot = 0;
    uint64_t stall_cycles = 0;
    uint64_t end_cycle = 0;
};

class Simulator {
public:
    Simulator(const HetGraph& g, const SemanticGraphSet& sems, const ModelParams& params,
              const ModelConfig& mcfg, const FeatureStore& store, const GroupPlan& plan,
              Paradigm paradigm, const HwConfig& hw)
        : g_(g),
          sems_(sems),
          params_(params),
          mcfg_(mcfg),
          store_(store),
          plan_(plan),
          paradigm_(paradigm),
          hw_(hw),
          ms_(hw.cache, hw.hbm, hw.buffers, hw.channels.n_channels),
          ch_(hw.channels.n_channels) {}

    SimReport run() {
        hw_.validate();
        mcfg_.validate();
        plan_.validate();
        if (plan_.n_targets != sems_.target_count)
            throw ValidationError("simulate_run: group plan does not match the graph");

        if (hw_.unit_trace) ms_.enable_access_log();
        compute_release_cycles();
        fp_phase();
        na_sf_phase();
        finish();
        return std::move(report_);
    }

private:
    uint32_t n_channels() const { return hw_.channels.n_channels; }
    uint32_t d_hid_bytes() const { return mcfg_.d_hid * sizeof(float); }

    uint64_t fetch_cycle(const ChannelState& st) const {
        return st.fetch_slot / hw_.fetch_issue_per_cycle;
    }

    // Rate-limited cache read through the channel's fetch engine. Misses wait
    // for a slot in the channel's outstanding-miss window.
    uint64_t issue_read(uint32_t chan, const CacheKey& key, uint32_t bytes, MemRole role) {
        auto& st = ch_[chan];
        uint64_t cy = fetch_cycle(st);
        if (ms_.would_miss(key, chan)) cy = std::max(cy, ms_.miss_issue_floor(chan));
        const AccessResult res = ms_.access(key, bytes, role, chan, cy);
        st.fetch_slot = std::max(st.fetch_slot, cy * hw_.fetch_issue_per_cycle) + 1;
        return res.ready_cycle;
    }

    uint64_t schedule(uint32_t chan, size_t pool_idx, uint64_t ready, uint64_t duration,
                      const char* kind) {
        auto& st = ch_[chan];
        auto slot = st.pools[pool_idx].schedule(ready, duration);
        st.end_cycle = std::max(st.end_cycle, slot.end);
        if (hw_.unit_trace) report_.unit_trace.push_back({chan, kind, slot.unit, slot.start, slot.end});
        return slot.end;
    }

    void compute_release_cycles() {
        release_cycle_.resize(plan_.groups.size(), 0);
        std::vector<uint64_t> prefix(plan_.frontier_trace.size() + 1, 0);
        for (size_t i = 0; i < plan_.frontier_trace.size(); ++i) {
            const uint32_t f = plan_.frontier_trace[i];
            prefix[i + 1] = prefix[i] + ceil_div(f, hw_.grouper.n_mac) +
                            ceil_log2(std::max<uint64_t>(f, 2)) + hw_.grouper.c_update;
            report_.grouper_mac_ops += f;
        }
        report_.grouper_cycles = prefix.back();
        for (size_t i = 0; i < plan_.groups.size(); ++i)
            release_cycle_[i] = prefix[plan_.groups[i].trace_end];
    }

    void fp_phase() {
        // Parameter preloads; FP waits until the weight buffers are filled.
        uint64_t ready = ms_.preload_buffer(params_.weight_bytes(), hw_.buffers.weight_bytes,
                                            MemRole::Weights, 0, 0);
        if (mcfg_.variant == ModelVariant::RgatLike)
            ready = std::max(ready, ms_.preload_buffer(params_.attention_bytes(),
                                                       hw_.buffers.attention_bytes,
                                                       MemRole::Weights, 0, 0));
        if (plan_.hypergraph_bytes > 0)
            ms_.preload_buffer(plan_.hypergraph_bytes, hw_.buffers.grouper_bytes,
                               MemRole::Adjacency, 0, 0);

        for (auto& st : ch_) {
            st.pools.clear();
            st.pools.emplace_back(hw_.channels.rpes_per_channel, 0);  // all linear in FP
            st.fetch_slot = ready * hw_.fetch_issue_per_cycle;
        }

        const auto part = participating_types(g_, sems_);
        uint64_t idx = 0;
        for (VertexTypeId t = 0; t < g_.vertex_types.size(); ++t) {
            if (!part[t]) continue;
            const uint32_t d_in = g_.vertex_types[t].feature_dim;
            const uint64_t dur = rpe_linear_cycles(d_in, mcfg_.d_hid, hw_.rpe);
            for (VertexId v = 0; v < g_.vertex_types[t].count; ++v, ++idx) {
                const auto chan = static_cast<uint32_t>(idx % n_channels());
                const uint64_t arr = issue_read(chan, {t, v, kStageRaw},
                                                d_in * sizeof(float), MemRole::RawFeature);
                const uint64_t end = schedule(chan, 0, arr, dur, "fp-linear");
                report_.linear_tasks++;
                report_.busy_linear_cycles += dur;
                report_.linear_moa_ops += static_cast<uint64_t>(d_in) * mcfg_.d_hid;
                ms_.store({t, v, kStageProjected}, d_hid_bytes(), MemRole::ProjectedFeature, chan,
                          end);
            }
        }
        fp_done_ = 0;
        for (auto& st : ch_) fp_done_ = std::max(fp_done_, std::max(st.end_cycle, fetch_cycle(st)));
        report_.fp_cycles = fp_done_;
    }

    void switch_to_na_pools() {
        const uint32_t per_chan = hw_.channels.rpes_per_channel;
        uint32_t n_agg = per_chan;
        if (mcfg_.variant == ModelVariant::RgatLike) {
            n_agg = static_cast<uint32_t>(
                std::llround(hw_.channels.agg_fraction_rgat * static_cast<double>(per_chan)));
            n_agg = std::min(std::max(n_agg, 1u), per_chan);
            if (n_agg == per_chan)
                throw ConfigError("hw: rgat-like runs need linear-mode RPEs during NA; "
                                  "lower the aggregation-mode fraction");
        }
        const uint64_t base = fp_done_ + hw_.mode_switch_cycles;
        for (auto& st : ch_) {
            st.pools.clear();
            st.pools.emplace_back(n_agg, 0);                        // aggregation mode
            st.pools.emplace_back(per_chan - n_agg, n_agg);         // linear mode
            st.fetch_slot = std::max(st.fetch_slot, base * hw_.fetch_issue_per_cycle);
            st.end_cycle = std::max(st.end_cycle, base);
        }
    }

    void stall_for_release(uint32_t chan, size_t group_idx) {
        auto& st = ch_[chan];
        const uint64_t rel = release_cycle_[group_idx];
        const uint64_t cur = fetch_cycle(st);
        if (rel > cur) {
            st.stall_cycles += rel - cur;
            st.fetch_slot = rel * hw_.fetch_issue_per_cycle;
        }
    }

    uint64_t group_adjacency_bytes(const GroupPlan::Group& grp, size_t only_relation,
                                   bool all_relations) const {
        uint64_t bytes = 0;
        for (VertexId v : grp.members) {
            for (size_t ri = 0; ri < sems_.relation_count(); ++ri) {
                if (!all_relations && ri != only_relation) continue;
                bytes += sizeof(uint64_t) +
                         sems_.neighbors[ri].neighbors(v).size() * sizeof(VertexId);
            }
        }
        return bytes;
    }

    // Attention scores for one (target, relation) workload on a linear-mode
    // RPE: the attention vector is the held operand, one column per score,
    // then a softmax pass through the activation module.
    uint64_t attention_ready(uint32_t chan, uint64_t data_ready, uint64_t n_scores) {
        const uint64_t dur = rpe_linear_cycles(2ull * mcfg_.d_hid, n_scores, hw_.rpe);
        const uint64_t end = schedule(chan, 1, data_ready, dur, "na-linear");
        report_.linear_tasks++;
        report_.busy_linear_cycles += dur;
        report_.linear_moa_ops += 2ull * mcfg_.d_hid * n_scores;
        report_.activation_elems += n_scores;
        return end + ceil_div(n_scores, hw_.activation_width);
    }

    uint64_t aggregate_task(uint32_t chan, uint64_t ready, uint64_t n_vectors, const char* kind) {
        const uint64_t dur = rpe_aggregation_cycles(n_vectors, mcfg_.d_hid, hw_.rpe);
        const uint64_t end = schedule(chan, 0, ready, dur, kind);
        report_.agg_tasks++;
        report_.busy_agg_cycles += dur;
        report_.agg_elem_ops += n_vectors * mcfg_.d_hid;
        return end;
    }

    // Fuses the per-relation vectors and streams the embedding out.
    uint64_t fuse_and_emit(uint32_t chan, uint64_t ready) {
        const uint64_t sf_end =
            aggregate_task(chan, ready, sems_.relation_count(), "sf-agg");
        report_.activation_elems += mcfg_.d_hid;
        const uint64_t z_ready = sf_end + ceil_div(mcfg_.d_hid, hw_.activation_width);
        ms_.stream_write(d_hid_bytes(), MemRole::OutputEmbedding, chan, z_ready);
        return z_ready;
    }

    void na_sf_phase() {
        switch_to_na_pools();
        if (paradigm_ == Paradigm::SemanticsComplete)
            na_semantics_complete();
        else
            na_per_semantic();
        uint64_t na_end = fp_done_;
        for (auto& st : ch_)
            na_end = std::max(na_end, std::max(st.end_cycle, fetch_cycle(st)));
        report_.na_sf_cycles = na_end - fp_done_;
    }

    void na_semantics_complete() {
        const VertexTypeId tt = sems_.target_type;
        for (size_t gi = 0; gi < plan_.groups.size(); ++gi) {
            const auto& grp = plan_.groups[gi];
            const auto chan = grp.channel;
            stall_for_release(chan, gi);
            uint64_t adj_ready = ms_.preload_buffer(group_adjacency_bytes(grp, 0, true),
                                                    hw_.buffers.adjacency_bytes,
                                                    MemRole::Adjacency, chan, fetch_cycle(ch_[chan]));
            adj_ready = std::max(adj_ready,
                                 ms_.preload_buffer(grp.members.size() * sizeof(VertexId),
                                                    hw_.buffers.target_bytes, MemRole::Adjacency,
                                                    chan, fetch_cycle(ch_[chan])));
            for (VertexId v : grp.members) {
                // One target fetch per workload, shared across semantics.
                const uint64_t tgt_ready = issue_read(chan, {tt, v, kStageProjected},
                                                      d_hid_bytes(), MemRole::ProjectedFeature);
                uint64_t fuse_ready = std::max(tgt_ready, adj_ready);
                for (size_t ri = 0; ri < sems_.relation_count(); ++ri) {
                    const auto neigh = sems_.neighbors[ri].neighbors(v);
                    if (neigh.empty()) continue;  // register copy of the self term
                    uint64_t data_ready = std::max(tgt_ready, adj_ready);
                    const VertexTypeId src = sems_.source_types[ri];
                    for (VertexId u : neigh)
                        data_ready = std::max(
                            data_ready, issue_read(chan, {src, u, kStageProjected}, d_hid_bytes(),
                                                   MemRole::ProjectedFeature));
                    if (mcfg_.variant == ModelVariant::RgatLike)
                        data_ready = attention_ready(chan, data_ready, neigh.size() + 1);
                    const uint64_t end = aggregate_task(chan, data_ready, neigh.size() + 1, "na-agg");
                    fuse_ready = std::max(fuse_ready, end);
                }
                fuse_and_emit(chan, fuse_ready);
            }
        }
    }

    void na_per_semantic() {
        const VertexTypeId tt = sems_.target_type;
        // One pass per relation over every group; intermediate rows travel
        // through the memory hierarchy instead of channel-local registers.
        for (size_t ri = 0; ri < sems_.relation_count(); ++ri) {
            for (size_t gi = 0; gi < plan_.groups.size(); ++gi) {
                const auto& grp = plan_.groups[gi];
                const auto chan = grp.channel;
                stall_for_release(chan, gi);
                uint64_t adj_ready = ms_.preload_buffer(group_adjacency_bytes(grp, ri, false),
                                                        hw_.buffers.adjacency_bytes,
                                                        MemRole::Adjacency, chan,
                                                        fetch_cycle(ch_[chan]));
                if (ri == 0)
                    adj_ready = std::max(
                        adj_ready, ms_.preload_buffer(grp.members.size() * sizeof(VertexId),
                                                      hw_.buffers.target_bytes, MemRole::Adjacency,
                                                      chan, fetch_cycle(ch_[chan])));
                for (VertexId v : grp.members) {
                    const auto neigh = sems_.neighbors[ri].neighbors(v);
                    if (neigh.empty()) continue;  // row materialized at fusion
                    uint64_t data_ready =
                        std::max(adj_ready, issue_read(chan, {tt, v, kStageProjected},
                                                       d_hid_bytes(), MemRole::ProjectedFeature));
                    const VertexTypeId src = sems_.source_types[ri];
                    for (VertexId u : neigh)
                        data_ready = std::max(
                            data_ready, issue_read(chan, {src, u, kStageProjected}, d_hid_bytes(),
                                                   MemRole::ProjectedFeature));
                    if (mcfg_.variant == ModelVariant::RgatLike)
                        data_ready = attention_ready(chan, data_ready, neigh.size() + 1);
                    const uint64_t end = aggregate_task(chan, data_ready, neigh.size() + 1, "na-agg");
                    ms_.store({tt, v, intermediate_stage(ri)}, d_hid_bytes(),
                              MemRole::NaIntermediate, chan, end);
                }
            }
        }
        // Fusion pass: load the per-relation rows back, fuse, emit.
        for (size_t gi = 0; gi < plan_.groups.size(); ++gi) {
            const auto& grp = plan_.groups[gi];
            const auto chan = grp.channel;
            for (VertexId v : grp.members) {
                uint64_t ready = 0;
                for (size_t ri = 0; ri < sems_.relation_count(); ++ri) {
                    const bool empty = sems_.neighbors[ri].neighbors(v).empty();
                    const CacheKey key = empty ? CacheKey{tt, v, kStageProjected}
                                               : CacheKey{tt, v, intermediate_stage(ri)};
                    const MemRole role =
                        empty ? MemRole::ProjectedFeature : MemRole::NaIntermediate;
                    ready = std::max(ready, issue_read(chan, key, d_hid_bytes(), role));
                }
                fuse_and_emit(chan, ready);
            }
        }
    }

    void finish() {
        report_.paradigm = to_string(paradigm_);
        report_.model_variant = to_string(mcfg_.variant);
        report_.n_channels = n_channels();
        report_.total_rpes = n_channels() * hw_.channels.rpes_per_channel;
        report_.plan_hash = plan_.content_hash();
        report_.fingerprint = {g_.content_hash(), store_.content_hash(),
                               model_hash(params_, mcfg_), order_hash(order_)};

        uint64_t end = std::max(fp_done_, report_.grouper_cycles);
        for (auto& st : ch_) {
            const uint64_t ch_end = std::max(st.end_cycle, fetch_cycle(st));
            report_.channel_end_cycles.push_back(ch_end);
            report_.channel_stall_cycles.push_back(st.stall_cycles);
            end = std::max(end, ch_end);
        }
        report_.mem = ms_.drain_and_report(end);
        if (hw_.unit_trace) report_.access_log = ms_.take_access_log();
        report_.total_cycles = std::max(end, report_.mem.last_completion_cycle);

        const double busy =
            static_cast<double>(report_.busy_linear_cycles + report_.busy_agg_cycles);
        const double span = static_cast<double>(report_.total_cycles) *
                            static_cast<double>(report_.total_rpes);
        report_.rpe_utilization = span > 0.0 ? busy / span : 0.0;
    }

public:
    void set_order(std::vector<VertexId> order) { order_ = std::move(order); }

private:
    const HetGraph& g_;
    const SemanticGraphSet& sems_;
    const ModelParams& params_;
    const ModelConfig& mcfg_;
    const FeatureStore& store_;
    const GroupPlan& plan_;
    Paradigm paradigm_;
    HwConfig hw_;
    MemorySystem ms_;
    std::vector<ChannelState> ch_;
    std::vector<uint64_t> release_cycle_;
    std::vector<VertexId> order_;
    uint64_t fp_done_ = 0;
    SimReport report_;
};

}  // namespace

SimReport simulate_run(const HetGraph& g, const SemanticGraphSet& sems, const ModelParams& params,
                       const ModelConfig& mcfg, const FeatureStore& store, const GroupPlan& plan,
                       Paradigm paradigm, const HwConfig& hw) {
    Simulator sim(g, sems, params, mcfg, store, plan, paradigm, hw);
    sim.set_order(plan.flatten());
    return sim.run();
}

nlohmann::ordered_json SimReport::to_json() const {
    nlohmann::ordered_json j;
    j["paradigm"] = paradigm;
    j["model_variant"] = model_variant;
    j["n_channels"] = n_channels;
    j["total_rpes"] = total_rpes;
    j["fingerprint"] = {{"graph", fingerprint.graph_hash},
                        {"features", fingerprint.feature_hash},
                        {"model", fingerprint.model_hash},
                        {"order", fingerprint.order_hash}};
    j["plan_hash"] = plan_hash;
    j["cycles"] = {{"total", total_cycles},
                   {"fp", fp_cycles},
                   {"na_sf", na_sf_cycles},
                   {"per_channel", channel_end_cycles},
                   {"stall_per_channel", channel_stall_cycles},
                   {"grouper", grouper_cycles}};
    j["rpe"] = {{"busy_linear", busy_linear_cycles},
                {"busy_agg", busy_agg_cycles},
                {"linear_tasks", linear_tasks},
                {"agg_tasks", agg_tasks},
                {"linear_moa_ops", linear_moa_ops},
                {"agg_elem_ops", agg_elem_ops},
                {"activation_elems", activation_elems},
                {"utilization", rpe_utilization}};
    j["grouper"] = {{"cycles", grouper_cycles}, {"mac_ops", grouper_mac_ops}};

    nlohmann::ordered_json mj;
    const char* role_names[kMemRoleCount] = {"raw_feature",     "projected_feature", "adjacency",
                                             "weights",         "intermediate_na",   "output_embedding"};
    for (size_t r = 0; r < kMemRoleCount; ++r) {
        mj["read_requests"][role_names[r]] = mem.read_requests[r];
        mj["read_bytes"][role_names[r]] = mem.read_bytes[r];
        mj["store_requests"][role_names[r]] = mem.store_requests[r];
        mj["dram_bytes"][role_names[r]] = mem.dram_bytes_by_role[r];
    }
    mj["cached_reads"] = mem.cached_reads;
    mj["hits_local"] = mem.hits_local;
    mj["hits_global"] = mem.hits_global;
    mj["dram_fills"] = mem.dram_fills;
    mj["dram_transactions"] = mem.dram_transactions;
    mj["dram_read_bytes"] = mem.dram_read_bytes;
    mj["dram_write_bytes"] = mem.dram_write_bytes;
    mj["dram_total_bytes"] = mem.dram_bytes;
    mj["dram_energy_pj"] = mem.dram_energy_pj;
    mj["feature_dram_bytes"] = mem.feature_dram_bytes();
    mj["feature_reads_total"] = mem.feature_reads_total;
    mj["feature_reads_distinct"] = mem.feature_reads_distinct;
    mj["local_hit_bytes"] = mem.local_hit_bytes;
    mj["global_hit_bytes"] = mem.global_hit_bytes;
    mj["buffer_preload_bytes"] = mem.buffer_preload_bytes;
    mj["buffer_overflows"] = mem.buffer_overflows;
    mj["peak_offchip_intermediate_bytes"] = mem.peak_offchip_intermediate_bytes;
    j["memory"] = std::move(mj);
    return j;
}

void SimReport::dump_unit_trace_csv(std::ostream& out) const {
    out << "channel,kind,unit,start,end\n";
    for (const auto& e : unit_trace)
        out << e.channel << ',' << e.kind << ',' << e.unit << ',' << e.start << ',' << e.end
            << '\n';
}

void SimReport::dump_access_log_csv(std::ostream& out) const {
    out << "cycle,type,id,stage,role,level,bytes\n";
    for (const auto& e : access_log)
        out << e.cycle << ',' << e.key.type << ',' << e.key.id << ',' << e.key.stage << ','
            << to_string(e.role) << ',' << to_string(e.level) << ',' << e.bytes << '\n';
}

}  // namespace hgsim
