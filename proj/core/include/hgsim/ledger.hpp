#pragma once

#include <array>
#include <iosfwd>

#include "hgsim/types.hpp"

namespace hgsim {

// Buffer roles tracked by the intermediate-memory ledger. Raw features and
// adjacency are the dataset's initial footprint and are not ledger events.
enum class LedgerRole : uint8_t {
    ProjectedFeatures = 0,
    NaIntermediate = 1,
    OutputEmbeddings = 2,
    Scratch = 3,
};
constexpr size_t kLedgerRoleCount = 4;

const char* to_string(LedgerRole r);

// Time-ordered alloc/free trace of run-internal buffers, with running and
// peak live byte counts, total and per role.
class IntermediateLedger {
public:
    struct Event {
        bool is_alloc;
        LedgerRole role;
        uint64_t bytes;
        uint64_t running_bytes;  // total live bytes after this event
    };

    void alloc(LedgerRole role, uint64_t bytes);
    void free(LedgerRole role, uint64_t bytes);

    uint64_t running_bytes() const { return running_; }
    uint64_t peak_bytes() const { return peak_; }
    uint64_t peak_bytes(LedgerRole role) const { return role_peak_[static_cast<size_t>(role)]; }
    uint64_t running_bytes(LedgerRole role) const { return role_running_[static_cast<size_t>(role)]; }

    const std::vector<Event>& events() const { return events_; }

    // All allocations must be freed by the end of a run.
    void check_balanced() const;

    void dump_csv(std::ostream& out) const;  // event,role,bytes,running_bytes

private:
    std::vector<Event> events_;
    uint64_t running_ = 0;
    uint64_t peak_ = 0;
    std::array<uint64_t, kLedgerRoleCount> role_running_{};
    std::array<uint64_t, kLedgerRoleCount> role_peak_{};
};

}  // namespace hgsim
