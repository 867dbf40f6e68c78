#include "bp/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "bp/parallel.hpp"

namespace bp {

namespace {

struct Candidate {
    double d2;
    int id;
    bool operator<(const Candidate& o) const {
        return d2 != o.d2 ? d2 < o.d2 : id < o.id;
    }
};

// Bounded best-k set ordered by (squared distance, id). A max-heap on that
// order keeps the current worst on top.
class CandidateHeap {
public:
    explicit CandidateHeap(int k) : k_(k) { heap_.reserve(k + 1); }

    bool full() const { return static_cast<int>(heap_.size()) == k_; }
    const Candidate& worst() const { return heap_.front(); }

    void offer(Candidate c) {
        if (!full()) {
            heap_.push_back(c);
            std::push_heap(heap_.begin(), heap_.end());
        } else if (c < heap_.front()) {
            std::pop_heap(heap_.begin(), heap_.end());
            heap_.back() = c;
            std::push_heap(heap_.begin(), heap_.end());
        }
    }

    std::vector<Candidate> sorted() && {
        std::sort(heap_.begin(), heap_.end());
        return std::move(heap_);
    }

private:
    int k_;
    std::vector<Candidate> heap_;
};

std::vector<Neighbor> to_neighbors(std::vector<Candidate> cands) {
    std::vector<Neighbor> out;
    out.reserve(cands.size());
    for (const auto& c : cands) out.push_back({c.id, std::sqrt(c.d2)});
    return out;
}

constexpr int kLeafSize = 16;
constexpr int kBruteForceDimLimit = 20;

}  // namespace

struct NeighborIndex::Impl {
    // kd-tree over active points; empty tree means brute-force mode.
    struct Node {
        int begin = 0, end = 0;       // range in order_ (leaves)
        int split_dim = -1;
        double split_val = 0.0;
        int left = -1, right = -1;
        std::vector<double> lo, hi;   // bounding box of the node's points
    };

    const PointSet* points = nullptr;
    const std::vector<int>* active = nullptr;
    std::vector<int> order;  // active ids permuted by the build
    std::vector<Node> nodes;
    int root = -1;
    bool brute = false;

    int build(int begin, int end) {
        Node node;
        node.begin = begin;
        node.end = end;
        int d = points->dim();
        node.lo.assign(d, std::numeric_limits<double>::infinity());
        node.hi.assign(d, -std::numeric_limits<double>::infinity());
        for (int i = begin; i < end; ++i) {
            auto p = points->point(order[i]);
            for (int j = 0; j < d; ++j) {
                node.lo[j] = std::min(node.lo[j], p[j]);
                node.hi[j] = std::max(node.hi[j], p[j]);
            }
        }
        int idx = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (end - begin <= kLeafSize) return idx;

        // Split on the widest dimension at the median point. Comparing by
        // (coordinate, id) keeps the build deterministic under ties.
        int dim = 0;
        double width = -1.0;
        for (int j = 0; j < d; ++j) {
            double w = node.hi[j] - node.lo[j];
            if (w > width) {
                width = w;
                dim = j;
            }
        }
        if (width <= 0.0) return idx;  // all points identical: stay a leaf

        int mid = (begin + end) / 2;
        std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                         [&](int a, int b) {
                             double ca = points->coord(a, dim), cb = points->coord(b, dim);
                             return ca != cb ? ca < cb : a < b;
                         });
        double split_val = points->coord(order[mid], dim);
        int left = build(begin, mid);
        int right = build(mid, end);
        nodes[idx].split_dim = dim;
        nodes[idx].split_val = split_val;
        nodes[idx].left = left;
        nodes[idx].right = right;
        return idx;
    }

    double min_dist2(const Node& node, std::span<const double> q) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
            double diff = 0.0;
            if (q[j] < node.lo[j]) diff = node.lo[j] - q[j];
            else if (q[j] > node.hi[j]) diff = q[j] - node.hi[j];
            acc += diff * diff;
        }
        return acc;
    }

    void search_knn(int node_idx, std::span<const double> q, int exclude, CandidateHeap& heap) const {
        const Node& node = nodes[node_idx];
        // Strict inequality: a boundary point at exactly the worst distance
        // could still win its tie on id.
        if (heap.full() && min_dist2(node, q) > heap.worst().d2) return;
        if (node.left == -1) {
            for (int i = node.begin; i < node.end; ++i) {
                int id = order[i];
                if (id == exclude) continue;
                heap.offer({squared_distance(points->point(id), q), id});
            }
            return;
        }
        int dim = node.split_dim;
        int near = q[dim] <= node.split_val ? node.left : node.right;
        int far = near == node.left ? node.right : node.left;
        search_knn(near, q, exclude, heap);
        search_knn(far, q, exclude, heap);
    }

    void search_radius(int node_idx, std::span<const double> q, double r2, int exclude,
                       std::vector<Candidate>& out) const {
        const Node& node = nodes[node_idx];
        if (min_dist2(node, q) > r2) return;
        if (node.left == -1) {
            for (int i = node.begin; i < node.end; ++i) {
                int id = order[i];
                if (id == exclude) continue;
                double d2 = squared_distance(points->point(id), q);
                if (d2 <= r2) out.push_back({d2, id});
            }
            return;
        }
        search_radius(node.left, q, r2, exclude, out);
        search_radius(node.right, q, r2, exclude, out);
    }
};

NeighborIndex::NeighborIndex(const PointSet& points, std::vector<int> active_ids, Metric metric,
                             bool force_brute_force)
    : points_(&points), active_ids_(std::move(active_ids)) {
    if (metric != Metric::kEuclidean) throw ValidationError("unsupported metric");
    if (active_ids_.size() < 2)
        throw DegenerateInputError("neighbor index needs at least 2 active points");
    std::sort(active_ids_.begin(), active_ids_.end());
    for (int id : active_ids_) {
        if (id < 0 || id >= points.size()) throw ValidationError("active id out of range");
    }
    if (std::adjacent_find(active_ids_.begin(), active_ids_.end()) != active_ids_.end())
        throw ValidationError("duplicate active id");

    active_mask_.assign(points.size(), 0);
    for (int id : active_ids_) active_mask_[id] = 1;

    impl_ = std::make_unique<Impl>();
    impl_->points = points_;
    impl_->active = &active_ids_;
    impl_->brute = force_brute_force || points.dim() > kBruteForceDimLimit;
    if (!impl_->brute) {
        impl_->order = active_ids_;
        impl_->nodes.reserve(2 * active_ids_.size() / kLeafSize + 4);
        impl_->root = impl_->build(0, static_cast<int>(active_ids_.size()));
    }
}

NeighborIndex::~NeighborIndex() = default;
NeighborIndex::NeighborIndex(NeighborIndex&&) noexcept = default;
NeighborIndex& NeighborIndex::operator=(NeighborIndex&&) noexcept = default;

bool NeighborIndex::is_active(int id) const {
    return id >= 0 && id < static_cast<int>(active_mask_.size()) && active_mask_[id];
}

namespace {

std::vector<Candidate> brute_knn(const PointSet& points, const std::vector<int>& active,
                                 std::span<const double> q, int k, int exclude) {
    CandidateHeap heap(k);
    for (int id : active) {
        if (id == exclude) continue;
        heap.offer({squared_distance(points.point(id), q), id});
    }
    return std::move(heap).sorted();
}

}  // namespace

std::vector<Neighbor> NeighborIndex::knn(int id, int k) const {
    if (!is_active(id)) throw ValidationError("knn query for an inactive point");
    if (k < 1) throw ValidationError("knn requires k >= 1");
    k = std::min(k, active_count() - 1);
    if (impl_->brute)
        return to_neighbors(brute_knn(*points_, active_ids_, points_->point(id), k, id));
    CandidateHeap heap(k);
    impl_->search_knn(impl_->root, points_->point(id), id, heap);
    return to_neighbors(std::move(heap).sorted());
}

std::vector<Neighbor> NeighborIndex::knn_at(std::span<const double> query, int k) const {
    if (k < 1) throw ValidationError("knn requires k >= 1");
    if (query.size() != static_cast<std::size_t>(points_->dim()))
        throw ValidationError("query dimension mismatch");
    k = std::min(k, active_count());
    if (impl_->brute) return to_neighbors(brute_knn(*points_, active_ids_, query, k, -1));
    CandidateHeap heap(k);
    impl_->search_knn(impl_->root, query, -1, heap);
    return to_neighbors(std::move(heap).sorted());
}

std::vector<Neighbor> NeighborIndex::radius(int id, double radius) const {
    if (!is_active(id)) throw ValidationError("radius query for an inactive point");
    return radius_at(points_->point(id), radius, id);
}

std::vector<Neighbor> NeighborIndex::radius_at(std::span<const double> query,
                                               double radius) const {
    return radius_at(query, radius, -1);
}

std::vector<Neighbor> NeighborIndex::radius_at(std::span<const double> query, double radius,
                                               int exclude) const {
    if (radius < 0.0) throw ValidationError("radius must be non-negative");
    double r2 = radius * radius;
    std::vector<Candidate> found;
    if (impl_->brute) {
        for (int id : active_ids_) {
            if (id == exclude) continue;
            double d2 = squared_distance(points_->point(id), query);
            if (d2 <= r2) found.push_back({d2, id});
        }
    } else {
        impl_->search_radius(impl_->root, query, r2, exclude, found);
    }
    std::sort(found.begin(), found.end());
    return to_neighbors(std::move(found));
}

std::vector<std::vector<Neighbor>> NeighborIndex::all_knn(int k) const {
    std::vector<std::vector<Neighbor>> lists(active_ids_.size());
    parallel_for(active_count(), [&](int pos) { lists[pos] = knn(active_ids_[pos], k); });
    return lists;
}

ReverseNeighborMap reverse_knn(const NeighborIndex& index, int k) {
    return reverse_knn_from_lists(index, index.all_knn(k));
}

ReverseNeighborMap reverse_knn_from_lists(const NeighborIndex& index,
                                          const std::vector<std::vector<Neighbor>>& knn_lists) {
    ReverseNeighborMap reverse(index.points().size());
    const auto& ids = index.active_ids();
    for (std::size_t pos = 0; pos < ids.size(); ++pos) {
        for (const auto& nb : knn_lists[pos]) reverse[nb.id].push_back(ids[pos]);
    }
    // Source ids were visited in ascending order, so each list is sorted.
    return reverse;
}

std::vector<int> all_ids(const PointSet& points) {
    std::vector<int> ids(points.size());
    std::iota(ids.begin(), ids.end(), 0);
    return ids;
}

}  // namespace bp
