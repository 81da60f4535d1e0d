#pragma once

#include <array>
#include <deque>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "hgsim/types.hpp"

namespace hgsim {

// Memory traffic classes tracked by the counters.
enum class MemRole : uint8_t {
    RawFeature = 0,
    ProjectedFeature = 1,
    Adjacency = 2,
    Weights = 3,
    NaIntermediate = 4,
    OutputEmbedding = 5,
};
constexpr size_t kMemRoleCount = 6;
const char* to_string(MemRole r);

// Feature cache lines are keyed by vertex type, vertex id and execution
// stage id (0 = raw feature, 1 = projected feature, 2+r = the NA
// intermediate under relation r).
struct CacheKey {
    VertexTypeId type = 0;
    VertexId id = 0;
    uint32_t stage = 0;

    friend bool operator==(const CacheKey&, const CacheKey&) = default;
};
constexpr uint32_t kStageRaw = 0;
constexpr uint32_t kStageProjected = 1;
inline uint32_t intermediate_stage(size_t relation_index) {
    return 2 + static_cast<uint32_t>(relation_index);
}

struct CacheKeyHash {
    size_t operator()(const CacheKey& k) const noexcept {
        uint64_t h = (static_cast<uint64_t>(k.type) << 48) ^ (static_cast<uint64_t>(k.stage) << 36) ^
                     k.id;
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdull;
        h ^= h >> 33;
        return h;
    }
};

struct CacheConfig {
    uint64_t global_bytes = 2ull << 20;
    uint64_t local_bytes = 1ull << 20;  // per channel
    uint32_t line_bytes = 64;
    uint32_t local_hit_latency = 1;
    uint32_t global_hit_latency = 4;
};

struct HbmConfig {
    uint64_t bytes_per_cycle = 512;    // 512 GB/s at 1 GHz
    uint32_t latency_cycles = 100;
    uint32_t transaction_bytes = 64;
    double energy_pj_per_bit = 7.0;
    uint32_t max_outstanding_misses = 16;  // per channel fetch engine
};

// Table-derived capacities; buffers are capacity checks plus preload
// traffic, not timed structures.
struct BufferConfig {
    uint64_t weight_bytes = 1'640'000;
    uint64_t target_bytes = 600'000;
    uint64_t attention_bytes = 1'000'000;
    uint64_t adjacency_bytes = 1'400'000;
    uint64_t grouper_bytes = 1'200'000;
};

// Rough on-chip energy estimates; only the DRAM pJ/bit figure is
// device-calibrated, the rest are order-of-magnitude placeholders.
struct EnergyConfig {
    double local_hit_pj_per_byte = 0.2;
    double global_hit_pj_per_byte = 0.5;
    double buffer_pj_per_byte = 0.2;
    double rpe_pj_per_op = 0.8;
    double grouper_pj_per_op = 0.8;
    double activation_pj_per_elem = 0.1;
};

enum class HitLevel : uint8_t { Local = 0, Global = 1, Dram = 2 };
const char* to_string(HitLevel l);

struct AccessResult {
    HitLevel level = HitLevel::Local;
    uint64_t ready_cycle = 0;
};

struct MemAccessLogEntry {
    uint64_t cycle = 0;
    CacheKey key;
    MemRole role = MemRole::RawFeature;
    HitLevel level = HitLevel::Local;
    uint32_t bytes = 0;
};

struct MemCounters {
    std::array<uint64_t, kMemRoleCount> read_requests{};
    std::array<uint64_t, kMemRoleCount> read_bytes{};
    std::array<uint64_t, kMemRoleCount> store_requests{};
    std::array<uint64_t, kMemRoleCount> store_bytes{};
    std::array<uint64_t, kMemRoleCount> dram_bytes_by_role{};  // fills + writebacks

    uint64_t cached_reads = 0;  // access() calls; hits + fills sum to this
    uint64_t hits_local = 0;
    uint64_t hits_global = 0;
    uint64_t dram_fills = 0;

    uint64_t dram_transactions = 0;
    uint64_t dram_read_bytes = 0;
    uint64_t dram_write_bytes = 0;
    uint64_t dram_bytes = 0;
    double dram_energy_pj = 0.0;

    uint64_t local_hit_bytes = 0;
    uint64_t global_hit_bytes = 0;
    uint64_t buffer_preload_bytes = 0;
    uint64_t buffer_overflows = 0;

    uint64_t feature_reads_total = 0;
    uint64_t feature_reads_distinct = 0;

    uint64_t peak_offchip_intermediate_bytes = 0;
    uint64_t last_completion_cycle = 0;

    uint64_t total_read_requests() const;
    uint64_t feature_dram_bytes() const {
        return dram_bytes_by_role[static_cast<size_t>(MemRole::RawFeature)] +
               dram_bytes_by_role[static_cast<size_t>(MemRole::ProjectedFeature)];
    }
};

// Single FIFO level. A key occupies ceil(bytes / line) lines and resides at
// most once; eviction is strict insertion order with no promotion.
class FifoCache {
public:
    FifoCache() = default;
    FifoCache(uint64_t capacity_bytes, uint32_t line_bytes);

    struct Evicted {
        CacheKey key;
        uint32_t lines = 0;
        bool dirty = false;
        MemRole role = MemRole::RawFeature;
    };

    bool contains(const CacheKey& key) const { return entries_.count(key) != 0; }
    // Inserts key, evicting in FIFO order; evictions are appended to `out`.
    // Keys wider than the whole cache are not inserted.
    void insert(const CacheKey& key, uint32_t lines, bool dirty, MemRole role,
                std::vector<Evicted>& out);
    void mark_dirty(const CacheKey& key);

    uint64_t occupancy_lines() const { return occupancy_; }
    uint64_t capacity_lines() const { return capacity_; }

private:
    struct Entry {
        uint32_t lines = 0;
        bool dirty = false;
        MemRole role = MemRole::RawFeature;
    };
    uint64_t capacity_ = 0;
    uint64_t occupancy_ = 0;
    std::unordered_map<CacheKey, Entry, CacheKeyHash> entries_;
    std::deque<CacheKey> fifo_;
};

// Two-level feature cache (channel-private locals in front of a shared
// global) backed by a fixed-latency HBM model with per-channel bandwidth
// slices and an outstanding-miss window per channel.
class MemorySystem {
public:
    MemorySystem(const CacheConfig& cache, const HbmConfig& hbm, const BufferConfig& buffers,
                 uint32_t n_channels);

    // Read through local(channel) -> global -> DRAM. A DRAM fill inserts the
    // key into the global cache and the requesting channel's local cache.
    AccessResult access(const CacheKey& key, uint32_t bytes, MemRole role, uint32_t channel,
                        uint64_t cycle);

    // On-chip write: the global copy is the dirty master, the local copy is a
    // clean shadow. Dirty evictions are written back to DRAM.
    void store(const CacheKey& key, uint32_t bytes, MemRole role, uint32_t channel,
               uint64_t cycle);

    // Uncached DRAM streams (adjacency, outputs, buffer preloads).
    uint64_t stream_read(uint64_t bytes, MemRole role, uint32_t channel, uint64_t cycle);
    uint64_t stream_write(uint64_t bytes, MemRole role, uint32_t channel, uint64_t cycle);

    // Preload with capacity check; overflow charges the traffic again to
    // model streaming reloads.
    uint64_t preload_buffer(uint64_t bytes, uint64_t capacity_bytes, MemRole role,
                            uint32_t channel, uint64_t cycle);

    // Earliest cycle a miss may issue given the channel's outstanding window.
    uint64_t miss_issue_floor(uint32_t channel) const;

    // True when neither the channel's local cache nor the global cache holds
    // the key; the fetch engine uses this to rate-limit miss issue.
    bool would_miss(const CacheKey& key, uint32_t channel) const;

    const BufferConfig& buffers() const { return buffers_; }
    const HbmConfig& hbm() const { return hbm_; }
    const CacheConfig& cache_config() const { return cache_; }

    // Per-access debug log for the trace CSV; off by default.
    void enable_access_log() { log_enabled_ = true; }
    std::vector<MemAccessLogEntry> take_access_log() { return std::move(access_log_); }

    // Retires everything in flight and freezes the counters. Any access
    // afterwards is an ordering error.
    MemCounters drain_and_report(uint64_t cycle);

private:
    void check_open() const;
    uint64_t dram_service(uint64_t lines, uint32_t channel, uint64_t cycle, bool is_write,
                          MemRole role);
    void handle_evictions(const std::vector<FifoCache::Evicted>& evicted, uint32_t channel,
                          uint64_t cycle);
    uint32_t lines_for(uint32_t bytes) const {
        return static_cast<uint32_t>(ceil_div(bytes, cache_.line_bytes));
    }

    CacheConfig cache_;
    HbmConfig hbm_;
    BufferConfig buffers_;
    uint32_t n_channels_;
    uint64_t slots_per_cycle_;  // 64B line slots per cycle per channel

    FifoCache global_;
    std::vector<FifoCache> locals_;
    std::vector<uint64_t> hbm_next_slot_;              // per channel
    std::vector<std::deque<uint64_t>> miss_window_;    // per channel completion times

    MemCounters counters_;
    std::unordered_set<uint64_t> distinct_feature_reads_;
    std::unordered_set<CacheKey, CacheKeyHash> offchip_intermediates_;
    uint64_t offchip_intermediate_bytes_ = 0;
    bool finished_ = false;
    bool log_enabled_ = false;
    std::vector<MemAccessLogEntry> access_log_;
};

}  // namespace hgsim
