#pragma once

#include <iosfwd>
#include <string>
#include <utility>

#include "hgsim/het_graph.hpp"

namespace hgsim {

enum class GraphFormat { EdgeListText, Binary };

struct LoadedGraph {
    HetGraph graph;
    FeatureStore features;
};

// Text format, line oriented:
//   vtype <name> <count> <feature-dim>
//   etype <name> <src-type> <dst-type>
//   target <type>
//   featseed <u64>                 (optional; seeds features for types
//                                   without explicit `feat` lines)
//   edge <etype> <src-id> <dst-id>
//   feat <vtype> <id> <f0> <f1> ...
// '#' starts a comment; blank lines are ignored. Duplicate edges are
// deduplicated. Vertex ids are dense 0..count-1 per type.
LoadedGraph load_graph(const std::string& path, GraphFormat format);
LoadedGraph load_graph_text(std::istream& in, const std::string& origin = "<stream>");

void save_graph(const LoadedGraph& lg, const std::string& path, GraphFormat format);
void save_graph_text(const LoadedGraph& lg, std::ostream& out);

// Binary round-trips bit-exactly; magic "HGSB", version 1, little endian.
LoadedGraph load_graph_binary(std::istream& in, const std::string& origin = "<stream>");
void save_graph_binary(const LoadedGraph& lg, std::ostream& out);

// Row-major Float32 matrix dump with a shape header, for oracle comparison.
void write_matrix(const MatrixF32& m, const std::string& path);
MatrixF32 read_matrix(const std::string& path);

}  // namespace hgsim
