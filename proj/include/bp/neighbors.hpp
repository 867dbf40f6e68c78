#pragma once

#include <memory>
#include <span>
#include <vector>

#include "bp/pointset.hpp"

namespace bp {

// Distance family for neighbor queries. Everything internal runs on squared
// Euclidean values; true distances are taken only at the API boundary. Other
// metrics are an extension point and unsupported for now.
enum class Metric { kEuclidean };

struct Neighbor {
    int id = -1;          // global point id
    double distance = 0;  // true (non-squared) distance
};

// Exact k-nearest-neighbor queries over the active subset of a point set.
// Backed by a kd-tree for d <= 20 and by a linear scan otherwise; both
// backends return identical results, including tie order (ascending distance,
// then ascending point id). The brute-force backend doubles as the test
// oracle.
class NeighborIndex {
public:
    NeighborIndex(const PointSet& points, std::vector<int> active_ids,
                  Metric metric = Metric::kEuclidean, bool force_brute_force = false);
    ~NeighborIndex();
    NeighborIndex(NeighborIndex&&) noexcept;
    NeighborIndex& operator=(NeighborIndex&&) noexcept;

    int active_count() const { return static_cast<int>(active_ids_.size()); }
    const std::vector<int>& active_ids() const { return active_ids_; }
    const PointSet& points() const { return *points_; }
    bool is_active(int id) const;

    // k nearest active points to active point `id`, excluding the point
    // itself; returns min(k, active_count - 1) entries.
    std::vector<Neighbor> knn(int id, int k) const;

    // k nearest active points to an arbitrary location (no exclusion).
    std::vector<Neighbor> knn_at(std::span<const double> query, int k) const;

    // Active points within true distance `radius` of active point `id`
    // (inclusive), excluding the point itself, ordered by (distance, id).
    std::vector<Neighbor> radius(int id, double radius) const;

    std::vector<Neighbor> radius_at(std::span<const double> query, double radius) const;

    // Batch knn for every active point, indexed by active position;
    // internally parallel, output independent of worker count.
    std::vector<std::vector<Neighbor>> all_knn(int k) const;

private:
    struct Impl;
    std::vector<Neighbor> radius_at(std::span<const double> query, double radius,
                                    int exclude) const;

    const PointSet* points_;
    std::vector<int> active_ids_;
    std::vector<char> active_mask_;
    std::unique_ptr<Impl> impl_;
};

// reverse[id] = active points that count `id` among their k nearest,
// ascending id; empty vectors for inactive ids.
using ReverseNeighborMap = std::vector<std::vector<int>>;

// Exact inversion of the knn relation over the active set.
ReverseNeighborMap reverse_knn(const NeighborIndex& index, int k);

// Inversion from precomputed per-active-point knn lists (same layout as
// NeighborIndex::all_knn).
ReverseNeighborMap reverse_knn_from_lists(const NeighborIndex& index,
                                          const std::vector<std::vector<Neighbor>>& knn_lists);

std::vector<int> all_ids(const PointSet& points);

}  // namespace bp
