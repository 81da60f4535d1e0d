#pragma once

#include <iosfwd>

#include "hgsim/types.hpp"

namespace hgsim {

// Ordered log of logical feature-vector reads issued by the functional
// engine. One entry per vector read, independent of vector width.
struct AccessTrace {
    struct Read {
        VertexRef vertex;
        AccessRole role;
        EdgeTypeId relation;  // kNoRelation when not tied to one semantic
        Stage stage;
    };

    std::vector<Read> reads;

    void log(VertexRef v, AccessRole role, EdgeTypeId relation, Stage stage) {
        reads.push_back({v, role, relation, stage});
    }

    size_t total_reads() const { return reads.size(); }
    size_t distinct_vertices() const;
    size_t count(AccessRole role, Stage stage) const;

    void dump_csv(std::ostream& out) const;  // type,id,role,relation,stage
};

// (total reads - distinct vertices read) / total reads. Throws on an empty
// trace, where the metric is undefined.
double redundancy_fraction(const AccessTrace& trace);

}  // namespace hgsim
