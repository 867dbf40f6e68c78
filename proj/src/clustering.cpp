#include "bp/clustering.hpp"

#include <algorithm>
#include <numeric>

#include "bp/errors.hpp"
#include "bp/neighbors.hpp"

namespace bp {

namespace {

struct UnionFind {
    std::vector<int> parent;

    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];  // path halving
            x = parent[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

}  // namespace

int ReachabilityGraph::component_of(int id) const {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), id);
    if (it == nodes.end() || *it != id)
        throw ValidationError("point " + std::to_string(id) + " is not a core point");
    return component[it - nodes.begin()];
}

int default_min_cluster_size(int n) { return n < 1000 ? 10 : 30; }

ReachabilityGraph merge_cores(const std::vector<int>& cores, const std::vector<double>& l_final,
                              const PointSet& points) {
    if (cores.empty()) throw ValidationError("core merging needs at least one core point");

    ReachabilityGraph graph;
    graph.nodes = cores;
    std::sort(graph.nodes.begin(), graph.nodes.end());

    const int m = int(graph.nodes.size());
    UnionFind uf(m);

    if (m > 1) {
        // Positions of node ids for translating query results back.
        std::vector<int> pos(points.size(), -1);
        for (int p = 0; p < m; ++p) pos[graph.nodes[p]] = p;

        // A pair within max(l_i, l_j) is within l_i or within l_j, so one
        // range query per endpoint with its own radius finds every edge.
        NeighborIndex index(points, graph.nodes);
        for (int p = 0; p < m; ++p) {
            const int i = graph.nodes[p];
            for (const auto& nb : index.radius(i, l_final[i])) {
                uf.unite(p, pos[nb.id]);
                if (i < nb.id) graph.edges.emplace_back(i, nb.id);
                else graph.edges.emplace_back(nb.id, i);
            }
        }
        std::sort(graph.edges.begin(), graph.edges.end());
        graph.edges.erase(std::unique(graph.edges.begin(), graph.edges.end()),
                          graph.edges.end());
    }

    // Component ids ordered by each component's smallest member.
    graph.component.assign(m, -1);
    for (int p = 0; p < m; ++p) {
        int root = uf.find(p);
        if (graph.component[root] < 0) graph.component[root] = graph.n_components++;
        graph.component[p] = graph.component[root];
    }
    return graph;
}

ClusteringResult propagate_labels(const ReachabilityGraph& graph, const PeelState& state,
                                  const PeelingTrace& trace, int min_cluster_size) {
    if (min_cluster_size < 1) throw ValidationError("minimum cluster size must be at least 1");
    const int n = int(state.active.size());

    std::vector<int> raw(n, ClusterLabels::kNoise);
    std::vector<char> resolved(n, 0);
    for (int p = 0; p < int(graph.nodes.size()); ++p) {
        raw[graph.nodes[p]] = graph.component[p];
        resolved[graph.nodes[p]] = 1;
    }

    // Later-peeled points come first so every rho target is already
    // resolved: an association always names a point that outlived it.
    auto peeled = state.peeled_ids();
    std::sort(peeled.begin(), peeled.end(), [&](int a, int b) {
        if (state.peeled_at[a] != state.peeled_at[b])
            return state.peeled_at[a] > state.peeled_at[b];
        return a < b;
    });
    for (int i : peeled) {
        int target = state.rho[i];
        if (target >= 0) {
            if (!resolved[target])
                throw Error("association links form a cycle at point " + std::to_string(i));
            raw[i] = raw[target];
        }
        resolved[i] = 1;
    }

    // Size filter, counting every chain-attached member.
    std::vector<int> sizes(graph.n_components, 0);
    for (int v : raw)
        if (v >= 0) ++sizes[v];
    for (int& v : raw)
        if (v >= 0 && sizes[v] < min_cluster_size) v = ClusterLabels::kNoise;

    ClusteringResult result{ClusterLabels::compacted(raw),
                            graph.nodes,
                            state.b0,
                            trace,
                            state.lambda};
    return result;
}

std::pair<std::vector<int>, std::vector<int>> confidence_ranking(const ClusteringResult& result,
                                                                 int cluster, int top_m) {
    if (cluster < 0 || cluster >= result.labels.n_clusters())
        throw ValidationError("unknown cluster label " + std::to_string(cluster));
    if (top_m < 0) throw ValidationError("ranking size must be non-negative");

    std::vector<int> members;
    for (int i = 0; i < result.labels.size(); ++i)
        if (result.labels[i] == cluster) members.push_back(i);

    auto by_confidence = [&](bool descending) {
        std::vector<int> ids = members;
        std::stable_sort(ids.begin(), ids.end(), [&](int a, int b) {
            double ca = result.confidence[a], cb = result.confidence[b];
            if (ca != cb) return descending ? ca > cb : ca < cb;
            return a < b;
        });
        if (int(ids.size()) > top_m) ids.resize(top_m);
        return ids;
    };
    return {by_confidence(true), by_confidence(false)};
}

ClusteringResult cluster(const PointSet& points, const ClusterParams& params) {
    int min_size = params.min_cluster_size ? *params.min_cluster_size
                                           : default_min_cluster_size(points.size());
    if (min_size < 1) throw ValidationError("minimum cluster size must be at least 1");

    auto [state, trace] = run_peeling(points, params.peel);
    auto graph = merge_cores(state.core_ids(), state.l, points);
    return propagate_labels(graph, state, trace, min_size);
}

}  // namespace bp
