#include "hgsim/access_trace.hpp"

#include <ostream>
#include <unordered_set>

namespace hgsim {

size_t AccessTrace::distinct_vertices() const {
    std::unordered_set<VertexRef, VertexRefHash> seen;
    seen.reserve(reads.size());
    for (const auto& r : reads) seen.insert(r.vertex);
    return seen.size();
}

size_t AccessTrace::count(AccessRole role, Stage stage) const {
    size_t n = 0;
    for (const auto& r : reads)
        if (r.role == role && r.stage == stage) ++n;
    return n;
}

void AccessTrace::dump_csv(std::ostream& out) const {
    out << "type,id,role,relation,stage\n";
    for (const auto& r : reads) {
        out << r.vertex.type << ',' << r.vertex.id << ',' << to_string(r.role) << ',';
        if (r.relation == kNoRelation)
            out << '-';
        else
            out << r.relation;
        out << ',' << to_string(r.stage) << '\n';
    }
}

double redundancy_fraction(const AccessTrace& trace) {
    if (trace.reads.empty())
        throw UndefinedMetricError("redundancy_fraction: empty access trace");
    const double total = static_cast<double>(trace.total_reads());
    const double distinct = static_cast<double>(trace.distinct_vertices());
    return (total - distinct) / total;
}

}  // namespace hgsim
