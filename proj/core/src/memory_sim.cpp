#include "hgsim/memory_sim.hpp"

namespace hgsim {

const char* to_string(HitLevel l) {
    switch (l) {
        case HitLevel::Local: return "local";
        case HitLevel::Global: return "global";
        case HitLevel::Dram: return "dram";
    }
    return "?";
}

const char* to_string(MemRole r) {
    switch (r) {
        case MemRole::RawFeature: return "raw-feature";
        case MemRole::ProjectedFeature: return "projected-feature";
        case MemRole::Adjacency: return "adjacency";
        case MemRole::Weights: return "weights";
        case MemRole::NaIntermediate: return "intermediate-na";
        case MemRole::OutputEmbedding: return "output-embedding";
    }
    return "?";
}

uint64_t MemCounters::total_read_requests() const {
    uint64_t n = 0;
    for (auto v : read_requests) n += v;
    return n;
}

FifoCache::FifoCache(uint64_t capacity_bytes, uint32_t line_bytes)
    : capacity_(capacity_bytes / line_bytes) {}

void FifoCache::insert(const CacheKey& key, uint32_t lines, bool dirty, MemRole role,
                       std::vector<Evicted>& out) {
    auto it = entries_.find(key);
    if (it != entries_.end()) {
        it->second.dirty = it->second.dirty || dirty;
        return;  // at most one residence per key; FIFO order is not refreshed
    }
    if (lines > capacity_) return;  // wider than the cache, uncacheable
    while (occupancy_ + lines > capacity_) {
        const CacheKey victim = fifo_.front();
        fifo_.pop_front();
        auto ve = entries_.find(victim);
        out.push_back({victim, ve->second.lines, ve->second.dirty, ve->second.role});
        occupancy_ -= ve->second.lines;
        entries_.erase(ve);
    }
    entries_.emplace(key, Entry{lines, dirty, role});
    fifo_.push_back(key);
    occupancy_ += lines;
}

void FifoCache::mark_dirty(const CacheKey& key) {
    auto it = entries_.find(key);
    if (it != entries_.end()) it->second.dirty = true;
}

MemorySystem::MemorySystem(const CacheConfig& cache, const HbmConfig& hbm,
                           const BufferConfig& buffers, uint32_t n_channels)
    : cache_(cache), hbm_(hbm), buffers_(buffers), n_channels_(n_channels) {
    if (n_channels_ == 0) throw ConfigError("memory: channel count must be >= 1");
    if (cache_.line_bytes == 0 || hbm_.transaction_bytes != cache_.line_bytes)
        throw ConfigError("memory: transaction granularity must equal the cache line size");
    if (hbm_.bytes_per_cycle % cache_.line_bytes != 0)
        throw ConfigError("memory: bandwidth must be a multiple of the line size");
    slots_per_cycle_ = std::max<uint64_t>(1, hbm_.bytes_per_cycle / cache_.line_bytes / n_channels_);
    global_ = FifoCache(cache_.global_bytes, cache_.line_bytes);
    for (uint32_t c = 0; c < n_channels_; ++c)
        locals_.emplace_back(cache_.local_bytes, cache_.line_bytes);
    hbm_next_slot_.assign(n_channels_, 0);
    miss_window_.resize(n_channels_);
}

void MemorySystem::check_open() const {
    if (finished_)
        throw std::logic_error("memory: access after drain_and_report (ordering error)");
}

uint64_t MemorySystem::dram_service(uint64_t lines, uint32_t channel, uint64_t cycle,
                                    bool is_write, MemRole role) {
    const uint64_t bytes = lines * cache_.line_bytes;
    counters_.dram_transactions += lines;
    counters_.dram_bytes += bytes;
    counters_.dram_bytes_by_role[static_cast<size_t>(role)] += bytes;
    if (is_write)
        counters_.dram_write_bytes += bytes;
    else
        counters_.dram_read_bytes += bytes;

    // The channel's bandwidth slice is a virtual slot clock. Reads arrive in
    // fetch order and push the clock to their issue cycle; writes are
    // fire-and-forget and only reserve capacity, so a write retired at a
    // late compute cycle cannot stall reads issued earlier in machine time.
    auto& next = hbm_next_slot_[channel];
    uint64_t done_cycle;
    if (is_write) {
        next += lines;
        done_cycle = std::max(cycle, ceil_div(next, slots_per_cycle_)) + hbm_.latency_cycles;
    } else {
        next = std::max(next, cycle * slots_per_cycle_) + lines;
        done_cycle = ceil_div(next, slots_per_cycle_) + hbm_.latency_cycles;
    }
    counters_.last_completion_cycle = std::max(counters_.last_completion_cycle, done_cycle);
    return done_cycle;
}

void MemorySystem::handle_evictions(const std::vector<FifoCache::Evicted>& evicted,
                                    uint32_t channel, uint64_t cycle) {
    for (const auto& e : evicted) {
        if (!e.dirty) continue;
        dram_service(e.lines, channel, cycle, /*is_write=*/true, e.role);
        if (e.role == MemRole::NaIntermediate && offchip_intermediates_.insert(e.key).second) {
            offchip_intermediate_bytes_ += e.lines * cache_.line_bytes;
            counters_.peak_offchip_intermediate_bytes =
                std::max(counters_.peak_offchip_intermediate_bytes, offchip_intermediate_bytes_);
        }
    }
}

bool MemorySystem::would_miss(const CacheKey& key, uint32_t channel) const {
    return !locals_[channel].contains(key) && !global_.contains(key);
}

uint64_t MemorySystem::miss_issue_floor(uint32_t channel) const {
    const auto& win = miss_window_[channel];
    if (win.size() < hbm_.max_outstanding_misses) return 0;
    return win.front();
}

AccessResult MemorySystem::access(const CacheKey& key, uint32_t bytes, MemRole role,
                                  uint32_t channel, uint64_t cycle) {
    check_open();
    counters_.read_requests[static_cast<size_t>(role)]++;
    counters_.read_bytes[static_cast<size_t>(role)] += bytes;
    counters_.cached_reads++;
    if (role == MemRole::RawFeature || role == MemRole::ProjectedFeature) {
        counters_.feature_reads_total++;
        const uint64_t vkey = (static_cast<uint64_t>(key.type) << 32) | key.id;
        if (distinct_feature_reads_.insert(vkey).second) counters_.feature_reads_distinct++;
    }

    const uint32_t lines = lines_for(bytes);
    if (locals_[channel].contains(key)) {
        counters_.hits_local++;
        counters_.local_hit_bytes += bytes;
        if (log_enabled_) access_log_.push_back({cycle, key, role, HitLevel::Local, bytes});
        return {HitLevel::Local, cycle + cache_.local_hit_latency};
    }
    if (global_.contains(key)) {
        counters_.hits_global++;
        counters_.global_hit_bytes += bytes;
        if (log_enabled_) access_log_.push_back({cycle, key, role, HitLevel::Global, bytes});
        return {HitLevel::Global, cycle + cache_.global_hit_latency};
    }

    if (log_enabled_) access_log_.push_back({cycle, key, role, HitLevel::Dram, bytes});
    counters_.dram_fills++;
    const uint64_t ready = dram_service(lines, channel, cycle, /*is_write=*/false, role);

    auto& win = miss_window_[channel];
    win.push_back(ready);
    if (win.size() > hbm_.max_outstanding_misses) win.pop_front();

    std::vector<FifoCache::Evicted> evicted;
    global_.insert(key, lines, /*dirty=*/false, role, evicted);
    locals_[channel].insert(key, lines, /*dirty=*/false, role, evicted);
    handle_evictions(evicted, channel, cycle);
    return {HitLevel::Dram, ready};
}

void MemorySystem::store(const CacheKey& key, uint32_t bytes, MemRole role, uint32_t channel,
                         uint64_t cycle) {
    check_open();
    counters_.store_requests[static_cast<size_t>(role)]++;
    counters_.store_bytes[static_cast<size_t>(role)] += bytes;
    const uint32_t lines = lines_for(bytes);
    if (lines > global_.capacity_lines()) {  // uncacheable, write through
        dram_service(lines, channel, cycle, /*is_write=*/true, role);
        return;
    }
    std::vector<FifoCache::Evicted> evicted;
    global_.insert(key, lines, /*dirty=*/true, role, evicted);
    locals_[channel].insert(key, lines, /*dirty=*/false, role, evicted);
    handle_evictions(evicted, channel, cycle);
}

uint64_t MemorySystem::stream_read(uint64_t bytes, MemRole role, uint32_t channel,
                                   uint64_t cycle) {
    check_open();
    if (bytes == 0) return cycle;
    counters_.read_requests[static_cast<size_t>(role)]++;
    counters_.read_bytes[static_cast<size_t>(role)] += bytes;
    return dram_service(ceil_div(bytes, cache_.line_bytes), channel, cycle, /*is_write=*/false,
                        role);
}

uint64_t MemorySystem::stream_write(uint64_t bytes, MemRole role, uint32_t channel,
                                    uint64_t cycle) {
    check_open();
    if (bytes == 0) return cycle;
    counters_.store_requests[static_cast<size_t>(role)]++;
    counters_.store_bytes[static_cast<size_t>(role)] += bytes;
    return dram_service(ceil_div(bytes, cache_.line_bytes), channel, cycle, /*is_write=*/true,
                        role);
}

uint64_t MemorySystem::preload_buffer(uint64_t bytes, uint64_t capacity_bytes, MemRole role,
                                      uint32_t channel, uint64_t cycle) {
    check_open();
    uint64_t total = bytes;
    if (bytes > capacity_bytes) {
        counters_.buffer_overflows++;
        total += bytes;  // does not fit: charge a second streaming pass
    }
    counters_.buffer_preload_bytes += total;
    if (total == 0) return cycle;
    return dram_service(ceil_div(total, cache_.line_bytes), channel, cycle, /*is_write=*/false,
                        role);
}

MemCounters MemorySystem::drain_and_report(uint64_t cycle) {
    check_open();
    finished_ = true;
    counters_.last_completion_cycle = std::max(counters_.last_completion_cycle, cycle);
    counters_.dram_energy_pj =
        static_cast<double>(counters_.dram_bytes) * 8.0 * hbm_.energy_pj_per_bit;
    return counters_;
}

}  // namespace hgsim
