#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "bp/peeling.hpp"
#include "bp/pointset.hpp"

namespace bp {

// Reachability structure over the core points: nodes are connected when
// d(x_i, x_j) <= max(l_i, l_j), and components are the transitive closure.
struct ReachabilityGraph {
    std::vector<int> nodes;                  // core point ids, ascending
    std::vector<std::pair<int, int>> edges;  // deduplicated, each pair id-ordered
    std::vector<int> component;              // per node, 0..n_components-1
    int n_components = 0;

    int component_of(int id) const;  // by point id, ValidationError for non-nodes
};

struct ClusteringResult {
    ClusterLabels labels;
    std::vector<int> core_ids;
    std::vector<double> confidence;  // first-iteration density influence, per point
    PeelingTrace trace;
    double lambda = 0.0;

    int n_clusters() const { return labels.n_clusters(); }
    int n_noise() const { return labels.n_noise(); }
};

// 10 for small datasets, 30 once n reaches 1000.
int default_min_cluster_size(int n);

// Union core points whose distance stays within either endpoint's final
// association threshold, iterated to transitive closure.
ReachabilityGraph merge_cores(const std::vector<int>& cores, const std::vector<double>& l_final,
                              const PointSet& points);

// Walk each peeled point's association chain to a core component, mark
// dead-end chains as noise, drop clusters below min_cluster_size, and
// compact the surviving labels.
ClusteringResult propagate_labels(const ReachabilityGraph& graph, const PeelState& state,
                                  const PeelingTrace& trace, int min_cluster_size);

// The m highest- and m lowest-confidence member ids of one cluster, each
// list ordered (descending / ascending confidence, ties by id).
std::pair<std::vector<int>, std::vector<int>> confidence_ranking(const ClusteringResult& result,
                                                                 int cluster, int top_m);

struct ClusterParams {
    PeelParams peel;
    std::optional<int> min_cluster_size;  // defaulted from the dataset size when unset
};

// End-to-end pipeline: peel, merge the surviving cores, propagate labels.
ClusteringResult cluster(const PointSet& points, const ClusterParams& params);

}  // namespace bp
