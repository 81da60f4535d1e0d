#include "hgsim/grouping.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace hgsim {

SuperVertex build_super_vertex(const SemanticGraphSet& sems, VertexId v) {
    SuperVertex sv;
    sv.target = v;
    sv.neighborhood.push_back({sems.target_type, v});
    for (size_t ri = 0; ri < sems.relation_count(); ++ri)
        for (VertexId u : sems.neighbors[ri].neighbors(v))
            sv.neighborhood.push_back({sems.source_types[ri], u});
    std::sort(sv.neighborhood.begin(), sv.neighborhood.end());
    sv.neighborhood.erase(std::unique(sv.neighborhood.begin(), sv.neighborhood.end()),
                          sv.neighborhood.end());
    return sv;
}

double jaccard(const SuperVertex& a, const SuperVertex& b) {
    size_t i = 0, j = 0, common = 0;
    while (i < a.neighborhood.size() && j < b.neighborhood.size()) {
        if (a.neighborhood[i] == b.neighborhood[j]) {
            ++common;
            ++i;
            ++j;
        } else if (a.neighborhood[i] < b.neighborhood[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    const size_t uni = a.neighborhood.size() + b.neighborhood.size() - common;
    return uni == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(uni);
}

void OverlapHypergraph::dump_csv(std::ostream& out) const {
    out << "i,j,w\n";
    for (const auto& e : edges)
        out << supers[e.a].target << ',' << supers[e.b].target << ',' << e.weight << '\n';
}

OverlapHypergraph build_hypergraph(const SemanticGraphSet& sems, double delta) {
    HypergraphConfig cfg;
    cfg.delta = delta;
    return build_hypergraph(sems, cfg);
}

OverlapHypergraph build_hypergraph(const SemanticGraphSet& sems, const HypergraphConfig& cfg) {
    if (!(cfg.delta > 0.0) || cfg.delta > 1.0)
        throw ConfigError("build_hypergraph: delta must be in (0, 1]");

    const uint64_t n_targets = sems.target_count;
    const auto n_selected = static_cast<uint64_t>(
        std::min<double>(static_cast<double>(n_targets),
                         std::ceil(cfg.delta * static_cast<double>(n_targets))));

    // Rank targets by cross-semantic workload size, ties to the lower id.
    std::vector<std::pair<uint64_t, VertexId>> sizes(n_targets);
    for (uint64_t v = 0; v < n_targets; ++v) {
        uint64_t deg = 1;  // self
        for (size_t ri = 0; ri < sems.relation_count(); ++ri)
            deg += sems.neighbors[ri].neighbors(static_cast<VertexId>(v)).size();
        sizes[v] = {deg, static_cast<VertexId>(v)};
    }
    std::sort(sizes.begin(), sizes.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });

    OverlapHypergraph h;
    h.supers.reserve(n_selected);
    for (uint64_t i = 0; i < n_selected; ++i) h.supers.push_back(build_super_vertex(sems, sizes[i].second));

    // Inverted index neighbor -> supers, then score each co-occurring pair
    // once. Candidate pairs are sorted first so the optional per-super edge
    // cap prunes the same pairs on every run.
    std::unordered_map<VertexRef, std::vector<uint32_t>, VertexRefHash> index;
    for (uint32_t s = 0; s < h.supers.size(); ++s)
        for (const VertexRef& nb : h.supers[s].neighborhood) index[nb].push_back(s);

    std::vector<uint64_t> pairs;
    for (const auto& [nb, members] : index) {
        if (members.size() < 2) continue;
        for (size_t i = 0; i < members.size(); ++i) {
            for (size_t j = i + 1; j < members.size(); ++j) {
                uint32_t a = members[i], b = members[j];
                if (a > b) std::swap(a, b);
                pairs.push_back((static_cast<uint64_t>(a) << 32) | b);
            }
        }
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());

    std::vector<uint32_t> edge_count(h.supers.size(), 0);
    for (uint64_t key : pairs) {
        const auto a = static_cast<uint32_t>(key >> 32);
        const auto b = static_cast<uint32_t>(key & 0xffffffffu);
        if (cfg.max_edges_per_super != 0 &&
            (edge_count[a] >= cfg.max_edges_per_super || edge_count[b] >= cfg.max_edges_per_super))
            continue;
        const double w = jaccard(h.supers[a], h.supers[b]);
        if (w <= 0.0) continue;
        h.edges.push_back({a, b, w});
        ++edge_count[a];
        ++edge_count[b];
    }

    h.adjacency.resize(h.supers.size());
    h.degree.assign(h.supers.size(), 0.0);
    for (const auto& e : h.edges) {
        h.adjacency[e.a].push_back({e.b, e.weight});
        h.adjacency[e.b].push_back({e.a, e.weight});
        h.degree[e.a] += e.weight;
        h.degree[e.b] += e.weight;
        h.total_weight += e.weight;
    }
    return h;
}

double modularity_gain(const OverlapHypergraph& h, uint32_t v, std::span<const uint32_t> community) {
    if (h.total_weight == 0.0) return 0.0;
    std::unordered_set<uint32_t> members(community.begin(), community.end());
    double k_in = 0.0;
    for (const auto& [nb, w] : h.adjacency[v])
        if (members.count(nb)) k_in += w;
    double sum_tot = 0.0;
    for (uint32_t u : community) sum_tot += h.degree[u];
    const double m = h.total_weight;
    return k_in / m - (sum_tot * h.degree[v]) / (2.0 * m * m);
}

uint32_t group_size_cap(uint64_t n_targets, uint32_t n_channels) {
    if (n_channels == 0) throw ConfigError("grouping: channel count must be >= 1");
    return static_cast<uint32_t>(ceil_div(n_targets, n_channels));
}

namespace {

void append_sequential_chunks(GroupPlan& plan, const std::vector<VertexId>& targets,
                              uint32_t n_channels, size_t trace_end) {
    for (size_t i = 0; i < targets.size(); i += plan.n_max) {
        GroupPlan::Group grp;
        const size_t end = std::min(targets.size(), i + plan.n_max);
        grp.members.assign(targets.begin() + static_cast<ptrdiff_t>(i),
                           targets.begin() + static_cast<ptrdiff_t>(end));
        grp.release_index = static_cast<uint32_t>(plan.groups.size());
        grp.channel = grp.release_index % n_channels;
        grp.trace_end = trace_end;
        plan.groups.push_back(std::move(grp));
    }
}

}  // namespace

GroupPlan group_overlap_driven(const OverlapHypergraph& h, uint64_t n_targets,
                               uint32_t n_channels, uint64_t seed) {
    GroupPlan plan;
    plan.n_targets = n_targets;
    plan.n_max = group_size_cap(n_targets, n_channels);
    plan.hypergraph_bytes =
        h.edges.size() * (2 * sizeof(uint32_t) + sizeof(double)) + h.supers.size() * sizeof(uint64_t);

    const auto n_supers = static_cast<uint32_t>(h.supers.size());
    std::vector<uint32_t> scan_order(n_supers);
    for (uint32_t i = 0; i < n_supers; ++i) scan_order[i] = i;
    Rng rng(seed);
    rng.shuffle(scan_order);

    std::vector<bool> visited(n_supers, false);
    const double m = h.total_weight;

    for (uint32_t pos = 0; pos < n_supers; ++pos) {
        const uint32_t s = scan_order[pos];
        if (visited[s]) continue;
        visited[s] = true;

        GroupPlan::Group grp;
        grp.members.push_back(h.supers[s].target);
        double sum_tot = h.degree[s];

        // Frontier bookkeeping: weight from each unvisited candidate into the
        // growing group.
        std::unordered_map<uint32_t, double> k_in;
        for (const auto& [nb, w] : h.adjacency[s])
            if (!visited[nb]) k_in[nb] += w;

        while (grp.members.size() < plan.n_max && !k_in.empty()) {
            plan.frontier_trace.push_back(static_cast<uint32_t>(k_in.size()));
            uint32_t best = 0;
            double best_gain = 0.0;
            bool have_best = false;
            for (const auto& [cand, kin] : k_in) {
                double gain = 0.0;
                if (m > 0.0) gain = kin / m - (sum_tot * h.degree[cand]) / (2.0 * m * m);
                const VertexId cand_id = h.supers[cand].target;
                if (!have_best || gain > best_gain ||
                    (gain == best_gain && cand_id < h.supers[best].target)) {
                    best = cand;
                    best_gain = gain;
                    have_best = true;
                }
            }
            if (!have_best || best_gain <= 0.0) break;

            visited[best] = true;
            grp.members.push_back(h.supers[best].target);
            sum_tot += h.degree[best];
            k_in.erase(best);
            for (const auto& [nb, w] : h.adjacency[best])
                if (!visited[nb]) k_in[nb] += w;
        }

        grp.release_index = static_cast<uint32_t>(plan.groups.size());
        grp.channel = grp.release_index % n_channels;
        grp.trace_end = plan.frontier_trace.size();
        plan.groups.push_back(std::move(grp));
    }

    // Low-degree targets outside the hypergraph: simple sequential chunks,
    // available once hypergraph grouping has finished.
    std::vector<bool> covered(n_targets, false);
    for (const auto& sv : h.supers) covered[sv.target] = true;
    std::vector<VertexId> rest;
    for (uint64_t v = 0; v < n_targets; ++v)
        if (!covered[v]) rest.push_back(static_cast<VertexId>(v));
    append_sequential_chunks(plan, rest, n_channels, plan.frontier_trace.size());

    plan.validate();
    return plan;
}

GroupPlan group_random(uint64_t n_targets, uint32_t n_channels, uint64_t seed) {
    GroupPlan plan;
    plan.n_targets = n_targets;
    plan.n_max = group_size_cap(n_targets, n_channels);
    std::vector<VertexId> ids(n_targets);
    for (uint64_t v = 0; v < n_targets; ++v) ids[v] = static_cast<VertexId>(v);
    Rng rng(seed);
    rng.shuffle(ids);
    append_sequential_chunks(plan, ids, n_channels, 0);
    plan.validate();
    return plan;
}

GroupPlan group_sequential(uint64_t n_targets, uint32_t n_channels) {
    GroupPlan plan;
    plan.n_targets = n_targets;
    plan.n_max = group_size_cap(n_targets, n_channels);
    std::vector<VertexId> ids(n_targets);
    for (uint64_t v = 0; v < n_targets; ++v) ids[v] = static_cast<VertexId>(v);
    append_sequential_chunks(plan, ids, n_channels, 0);
    plan.validate();
    return plan;
}

void GroupPlan::validate() const {
    std::vector<bool> seen(n_targets, false);
    uint64_t covered = 0;
    for (const auto& g : groups) {
        if (g.members.size() > n_max)
            throw ValidationError("group plan: group exceeds size cap");
        for (VertexId v : g.members) {
            if (v >= n_targets || seen[v])
                throw ValidationError("group plan: not a partition of the targets");
            seen[v] = true;
            ++covered;
        }
    }
    if (covered != n_targets) throw ValidationError("group plan: does not cover all targets");
}

std::vector<VertexId> GroupPlan::flatten() const {
    std::vector<VertexId> order;
    order.reserve(n_targets);
    for (const auto& g : groups) order.insert(order.end(), g.members.begin(), g.members.end());
    return order;
}

uint64_t GroupPlan::content_hash() const {
    uint64_t h = fnv1a_u64(n_max, fnv1a_u64(n_targets));
    for (const auto& g : groups) {
        h = fnv1a_u64((static_cast<uint64_t>(g.release_index) << 32) | g.channel, h);
        if (!g.members.empty())
            h = fnv1a(g.members.data(), g.members.size() * sizeof(VertexId), h);
    }
    return h;
}

void GroupPlan::dump_csv(std::ostream& out) const {
    out << "group_id,release_index,channel,member_ids\n";
    for (size_t i = 0; i < groups.size(); ++i) {
        out << i << ',' << groups[i].release_index << ',' << groups[i].channel;
        for (VertexId v : groups[i].members) out << ',' << v;
        out << '\n';
    }
}

uint64_t grouper_cost(std::span<const uint32_t> frontier_trace, const GrouperHwConfig& hw) {
    if (hw.n_mac == 0) throw ConfigError("grouper: n_mac must be >= 1");
    uint64_t cycles = 0;
    for (uint32_t f : frontier_trace)
        cycles += ceil_div(f, hw.n_mac) + ceil_log2(std::max<uint64_t>(f, 2)) + hw.c_update;
    return cycles;
}

double mean_intra_group_jaccard(const SemanticGraphSet& sems, const GroupPlan& plan) {
    double sum = 0.0;
    uint64_t pairs = 0;
    std::vector<SuperVertex> svs;
    for (const auto& g : plan.groups) {
        if (g.members.size() < 2) continue;
        svs.clear();
        for (VertexId v : g.members) svs.push_back(build_super_vertex(sems, v));
        for (size_t i = 0; i < svs.size(); ++i)
            for (size_t j = i + 1; j < svs.size(); ++j) {
                sum += jaccard(svs[i], svs[j]);
                ++pairs;
            }
    }
    return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

double mean_consecutive_jaccard(const SemanticGraphSet& sems) {
    if (sems.target_count < 2) return 0.0;
    double sum = 0.0;
    SuperVertex prev = build_super_vertex(sems, 0);
    for (uint64_t v = 1; v < sems.target_count; ++v) {
        SuperVertex cur = build_super_vertex(sems, static_cast<VertexId>(v));
        sum += jaccard(prev, cur);
        prev = std::move(cur);
    }
    return sum / static_cast<double>(sems.target_count - 1);
}

}  // namespace hgsim
