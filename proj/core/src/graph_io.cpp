#include "hgsim/graph_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

namespace hgsim {
namespace {

constexpr uint32_t kBinaryMagic = 0x42534748u;  // "HGSB" little endian
constexpr uint32_t kBinaryVersion = 1;

[[noreturn]] void parse_fail(const std::string& origin, size_t line_no, const std::string& what) {
    throw ParseError(origin + ":" + std::to_string(line_no) + ": " + what);
}

struct PendingEdge {
    EdgeTypeId relation;
    VertexId src;
    VertexId dst;
};

RelationAdjacency build_adjacency(uint64_t n_dst, std::vector<std::pair<VertexId, VertexId>>& edges) {
    // edges are (dst, src) pairs; sort, dedup, pack into CSR.
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    RelationAdjacency adj;
    adj.offsets.assign(n_dst + 1, 0);
    for (const auto& e : edges) adj.offsets[e.first + 1]++;
    for (size_t i = 1; i < adj.offsets.size(); ++i) adj.offsets[i] += adj.offsets[i - 1];
    adj.sources.reserve(edges.size());
    for (const auto& e : edges) adj.sources.push_back(e.second);
    return adj;
}

template <typename T>
void write_pod(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const std::string& origin) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw ParseError(origin + ": truncated binary graph");
    return v;
}

void write_string(std::ostream& out, const std::string& s) {
    write_pod(out, static_cast<uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::string read_string(std::istream& in, const std::string& origin) {
    const auto n = read_pod<uint32_t>(in, origin);
    std::string s(n, '\0');
    in.read(s.data(), n);
    if (!in) throw ParseError(origin + ": truncated binary graph");
    return s;
}

}  // namespace

LoadedGraph load_graph_text(std::istream& in, const std::string& origin) {
    HetGraph g;
    std::vector<std::vector<std::pair<VertexId, VertexId>>> edges;  // per relation (dst, src)
    std::vector<bool> has_explicit;
    FeatureStore store;
    bool target_seen = false;

    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw)) continue;

        if (kw == "vtype") {
            VertexTypeInfo t;
            if (!(ls >> t.name >> t.count >> t.feature_dim))
                parse_fail(origin, line_no, "expected: vtype <name> <count> <feature-dim>");
            if (g.find_vertex_type(t.name))
                parse_fail(origin, line_no, "duplicate vertex type '" + t.name + "'");
            g.vertex_types.push_back(t);
        } else if (kw == "etype") {
            std::string name, src, dst;
            if (!(ls >> name >> src >> dst))
                parse_fail(origin, line_no, "expected: etype <name> <src-type> <dst-type>");
            auto s = g.find_vertex_type(src);
            auto d = g.find_vertex_type(dst);
            if (!s || !d)
                parse_fail(origin, line_no, "etype '" + name + "' references undeclared vertex type");
            if (g.find_relation(name))
                parse_fail(origin, line_no, "duplicate relation '" + name + "'");
            g.relations.push_back({name, *s, *d});
            edges.emplace_back();
        } else if (kw == "target") {
            std::string name;
            if (!(ls >> name)) parse_fail(origin, line_no, "expected: target <type>");
            auto t = g.find_vertex_type(name);
            if (!t) parse_fail(origin, line_no, "target references undeclared vertex type");
            g.target_type = *t;
            target_seen = true;
        } else if (kw == "featseed") {
            if (!(ls >> g.featseed)) parse_fail(origin, line_no, "expected: featseed <u64>");
        } else if (kw == "edge") {
            std::string rel;
            VertexId src, dst;
            if (!(ls >> rel >> src >> dst))
                parse_fail(origin, line_no, "expected: edge <etype> <src-id> <dst-id>");
            auto r = g.find_relation(rel);
            if (!r) parse_fail(origin, line_no, "edge references undeclared relation '" + rel + "'");
            const auto& info = g.relations[*r];
            if (src >= g.vertex_types[info.src_type].count)
                throw ValidationError(origin + ":" + std::to_string(line_no) + ": edge source id " +
                                      std::to_string(src) + " >= declared count of type '" +
                                      g.vertex_types[info.src_type].name + "'");
            if (dst >= g.vertex_types[info.dst_type].count)
                throw ValidationError(origin + ":" + std::to_string(line_no) + ": edge target id " +
                                      std::to_string(dst) + " >= declared count of type '" +
                                      g.vertex_types[info.dst_type].name + "'");
            edges[*r].push_back({dst, src});
        } else if (kw == "feat") {
            std::string tname;
            VertexId id;
            if (!(ls >> tname >> id))
                parse_fail(origin, line_no, "expected: feat <vtype> <id> <f0> ...");
            auto t = g.find_vertex_type(tname);
            if (!t) parse_fail(origin, line_no, "feat references undeclared vertex type");
            if (id >= g.vertex_types[*t].count)
                throw ValidationError(origin + ":" + std::to_string(line_no) +
                                      ": feat vertex id out of range");
            if (store.raw.size() < g.vertex_types.size()) {
                store.raw.resize(g.vertex_types.size());
                has_explicit.resize(g.vertex_types.size(), false);
            }
            auto& m = store.raw[*t];
            if (m.rows == 0)
                m = MatrixF32(static_cast<uint32_t>(g.vertex_types[*t].count),
                              g.vertex_types[*t].feature_dim);
            has_explicit[*t] = true;
            auto row = m.row(id);
            for (uint32_t i = 0; i < row.size(); ++i)
                if (!(ls >> row[i]))
                    parse_fail(origin, line_no, "feat line has fewer values than feature-dim");
            float extra;
            if (ls >> extra) parse_fail(origin, line_no, "feat line has more values than feature-dim");
        } else {
            parse_fail(origin, line_no, "unknown record '" + kw + "'");
        }
    }

    if (g.vertex_types.empty()) throw ParseError(origin + ": no vertex types declared");
    if (!target_seen) throw ParseError(origin + ": no target type declared");

    for (size_t r = 0; r < g.relations.size(); ++r)
        g.adjacency.push_back(build_adjacency(g.vertex_types[g.relations[r].dst_type].count, edges[r]));

    store.raw.resize(g.vertex_types.size());
    has_explicit.resize(g.vertex_types.size(), false);
    for (size_t t = 0; t < g.vertex_types.size(); ++t)
        if (store.raw[t].rows == 0)
            store.raw[t] = MatrixF32(static_cast<uint32_t>(g.vertex_types[t].count),
                                     g.vertex_types[t].feature_dim);
    fill_default_features(g, store, has_explicit);

    g.validate();
    store.validate_against(g);
    return {std::move(g), std::move(store)};
}

LoadedGraph load_graph(const std::string& path, GraphFormat format) {
    std::ifstream in(path, format == GraphFormat::Binary ? std::ios::binary : std::ios::in);
    if (!in) throw ParseError("cannot open graph file '" + path + "'");
    return format == GraphFormat::Binary ? load_graph_binary(in, path) : load_graph_text(in, path);
}

void save_graph_text(const LoadedGraph& lg, std::ostream& out) {
    const auto& g = lg.graph;
    for (const auto& t : g.vertex_types)
        out << "vtype " << t.name << ' ' << t.count << ' ' << t.feature_dim << '\n';
    for (const auto& r : g.relations)
        out << "etype " << r.name << ' ' << g.vertex_types[r.src_type].name << ' '
            << g.vertex_types[r.dst_type].name << '\n';
    out << "target " << g.vertex_types[g.target_type].name << '\n';
    out << "featseed " << g.featseed << '\n';
    for (size_t r = 0; r < g.relations.size(); ++r) {
        const auto& adj = g.adjacency[r];
        const uint64_t n_dst = g.vertex_types[g.relations[r].dst_type].count;
        for (uint64_t v = 0; v < n_dst; ++v)
            for (VertexId u : adj.neighbors(static_cast<VertexId>(v)))
                out << "edge " << g.relations[r].name << ' ' << u << ' ' << v << '\n';
    }
}

void save_graph_binary(const LoadedGraph& lg, std::ostream& out) {
    const auto& g = lg.graph;
    write_pod(out, kBinaryMagic);
    write_pod(out, kBinaryVersion);
    write_pod(out, static_cast<uint32_t>(g.vertex_types.size()));
    for (const auto& t : g.vertex_types) {
        write_string(out, t.name);
        write_pod(out, t.count);
        write_pod(out, t.feature_dim);
    }
    write_pod(out, static_cast<uint32_t>(g.relations.size()));
    for (const auto& r : g.relations) {
        write_string(out, r.name);
        write_pod(out, r.src_type);
        write_pod(out, r.dst_type);
    }
    write_pod(out, g.target_type);
    write_pod(out, g.featseed);
    for (const auto& adj : g.adjacency) {
        write_pod(out, static_cast<uint64_t>(adj.offsets.size()));
        out.write(reinterpret_cast<const char*>(adj.offsets.data()),
                  static_cast<std::streamsize>(adj.offsets.size() * sizeof(uint64_t)));
        write_pod(out, static_cast<uint64_t>(adj.sources.size()));
        out.write(reinterpret_cast<const char*>(adj.sources.data()),
                  static_cast<std::streamsize>(adj.sources.size() * sizeof(VertexId)));
    }
    for (const auto& m : lg.features.raw) {
        write_pod(out, m.rows);
        write_pod(out, m.cols);
        out.write(reinterpret_cast<const char*>(m.data.data()),
                  static_cast<std::streamsize>(m.data.size() * sizeof(float)));
    }
}

LoadedGraph load_graph_binary(std::istream& in, const std::string& origin) {
    if (read_pod<uint32_t>(in, origin) != kBinaryMagic)
        throw ParseError(origin + ": not a binary graph file (bad magic)");
    const auto version = read_pod<uint32_t>(in, origin);
    if (version != kBinaryVersion)
        throw ParseError(origin + ": unsupported binary graph version " + std::to_string(version));

    HetGraph g;
    const auto n_types = read_pod<uint32_t>(in, origin);
    for (uint32_t i = 0; i < n_types; ++i) {
        VertexTypeInfo t;
        t.name = read_string(in, origin);
        t.count = read_pod<uint64_t>(in, origin);
        t.feature_dim = read_pod<uint32_t>(in, origin);
        g.vertex_types.push_back(std::move(t));
    }
    const auto n_rel = read_pod<uint32_t>(in, origin);
    for (uint32_t i = 0; i < n_rel; ++i) {
        RelationInfo r;
        r.name = read_string(in, origin);
        r.src_type = read_pod<VertexTypeId>(in, origin);
        r.dst_type = read_pod<VertexTypeId>(in, origin);
        g.relations.push_back(std::move(r));
    }
    g.target_type = read_pod<VertexTypeId>(in, origin);
    g.featseed = read_pod<uint64_t>(in, origin);
    for (uint32_t r = 0; r < n_rel; ++r) {
        RelationAdjacency adj;
        adj.offsets.resize(read_pod<uint64_t>(in, origin));
        in.read(reinterpret_cast<char*>(adj.offsets.data()),
                static_cast<std::streamsize>(adj.offsets.size() * sizeof(uint64_t)));
        adj.sources.resize(read_pod<uint64_t>(in, origin));
        in.read(reinterpret_cast<char*>(adj.sources.data()),
                static_cast<std::streamsize>(adj.sources.size() * sizeof(VertexId)));
        if (!in) throw ParseError(origin + ": truncated binary graph");
        g.adjacency.push_back(std::move(adj));
    }
    FeatureStore store;
    for (uint32_t t = 0; t < n_types; ++t) {
        const auto rows = read_pod<uint32_t>(in, origin);
        const auto cols = read_pod<uint32_t>(in, origin);
        MatrixF32 m(rows, cols);
        in.read(reinterpret_cast<char*>(m.data.data()),
                static_cast<std::streamsize>(m.data.size() * sizeof(float)));
        if (!in) throw ParseError(origin + ": truncated binary graph");
        store.raw.push_back(std::move(m));
    }
    g.validate();
    store.validate_against(g);
    return {std::move(g), std::move(store)};
}

void save_graph(const LoadedGraph& lg, const std::string& path, GraphFormat format) {
    std::ofstream out(path, format == GraphFormat::Binary ? std::ios::binary : std::ios::out);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    if (format == GraphFormat::Binary)
        save_graph_binary(lg, out);
    else
        save_graph_text(lg, out);
}

void write_matrix(const MatrixF32& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    const uint32_t magic = 0x31424d45u;  // "EMB1"
    write_pod(out, magic);
    write_pod(out, m.rows);
    write_pod(out, m.cols);
    out.write(reinterpret_cast<const char*>(m.data.data()),
              static_cast<std::streamsize>(m.data.size() * sizeof(float)));
}

MatrixF32 read_matrix(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open matrix file '" + path + "'");
    if (read_pod<uint32_t>(in, path) != 0x31424d45u)
        throw ParseError(path + ": not a matrix dump (bad magic)");
    const auto rows = read_pod<uint32_t>(in, path);
    const auto cols = read_pod<uint32_t>(in, path);
    MatrixF32 m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data.data()),
            static_cast<std::streamsize>(m.data.size() * sizeof(float)));
    if (!in) throw ParseError(path + ": truncated matrix dump");
    return m;
}

}  // namespace hgsim
