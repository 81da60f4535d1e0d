#include "hgsim/ledger.hpp"

#include <ostream>

namespace hgsim {

const char* to_string(LedgerRole r) {
    switch (r) {
        case LedgerRole::ProjectedFeatures: return "projected";
        case LedgerRole::NaIntermediate: return "na-intermediate";
        case LedgerRole::OutputEmbeddings: return "output";
        case LedgerRole::Scratch: return "scratch";
    }
    return "?";
}

void IntermediateLedger::alloc(LedgerRole role, uint64_t bytes) {
    running_ += bytes;
    auto& rr = role_running_[static_cast<size_t>(role)];
    rr += bytes;
    peak_ = std::max(peak_, running_);
    auto& rp = role_peak_[static_cast<size_t>(role)];
    rp = std::max(rp, rr);
    events_.push_back({true, role, bytes, running_});
}

void IntermediateLedger::free(LedgerRole role, uint64_t bytes) {
    auto& rr = role_running_[static_cast<size_t>(role)];
    if (bytes > rr || bytes > running_)
        throw ValidationError("ledger: free exceeds live bytes for role " +
                              std::string(to_string(role)));
    rr -= bytes;
    running_ -= bytes;
    events_.push_back({false, role, bytes, running_});
}

void IntermediateLedger::check_balanced() const {
    if (running_ != 0)
        throw ValidationError("ledger: " + std::to_string(running_) +
                              " bytes still live at end of run");
}

void IntermediateLedger::dump_csv(std::ostream& out) const {
    out << "event,role,bytes,running_bytes\n";
    for (const auto& e : events_)
        out << (e.is_alloc ? "alloc" : "free") << ',' << to_string(e.role) << ',' << e.bytes << ','
            << e.running_bytes << '\n';
}

}  // namespace hgsim
