#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "bp/errors.hpp"

namespace bp {

// Immutable n x d coordinate matrix with optional per-point ground-truth
// labels. Noise in ground truth is the -1 sentinel.
class PointSet {
public:
    PointSet(std::vector<double> coords, int n, int d,
             std::optional<std::vector<int>> ground_truth = std::nullopt);

    int size() const { return n_; }
    int dim() const { return d_; }

    std::span<const double> point(int i) const {
        return {coords_.data() + static_cast<std::size_t>(i) * d_,
                static_cast<std::size_t>(d_)};
    }
    double coord(int i, int j) const {
        return coords_[static_cast<std::size_t>(i) * d_ + j];
    }
    const std::vector<double>& coords() const { return coords_; }

    bool has_ground_truth() const { return ground_truth_.has_value(); }
    const std::optional<std::vector<int>>& ground_truth() const { return ground_truth_; }

private:
    std::vector<double> coords_;  // row-major
    int n_ = 0;
    int d_ = 0;
    std::optional<std::vector<int>> ground_truth_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        double diff = a[j] - b[j];
        acc += diff * diff;
    }
    return acc;
}

inline double squared_distance(const PointSet& points, int i, int j) {
    return squared_distance(points.point(i), points.point(j));
}

// Final cluster assignment: per-point label in [0, n_clusters) or kNoise.
// Non-noise labels always form the contiguous range 0..n_clusters-1.
class ClusterLabels {
public:
    static constexpr int kNoise = -1;

    // Validates that non-noise labels already form a contiguous 0-based range.
    static ClusterLabels from_contiguous(std::vector<int> labels);

    // Remaps arbitrary non-negative labels onto 0..m-1 (ascending original
    // value), preserving the -1 noise sentinel.
    static ClusterLabels compacted(const std::vector<int>& raw);

    const std::vector<int>& labels() const { return labels_; }
    int n_clusters() const { return n_clusters_; }
    int size() const { return static_cast<int>(labels_.size()); }
    int operator[](int i) const { return labels_[i]; }
    int n_noise() const;

private:
    ClusterLabels(std::vector<int> labels, int n_clusters)
        : labels_(std::move(labels)), n_clusters_(n_clusters) {}

    std::vector<int> labels_;
    int n_clusters_ = 0;
};

}  // namespace bp
