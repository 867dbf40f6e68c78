#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bp/neighbors.hpp"
#include "bp/pointset.hpp"

namespace bp {

struct PeelParams {
    int k = 20;                            // neighborhood size
    double threshold_strictness = 3.0;     // C, scales the association threshold update
    double peel_fraction = 0.10;           // share of active points classified border per iteration
    std::optional<double> lambda;          // max association threshold; estimated when unset
    int max_iterations = 100;
    double termination_sensitivity = 3.0;  // z-score threshold of the stop rule

    void validate() const;
};

// Mutable per-iteration state of the peeling loop. Arrays are indexed by
// global point id; entries of peeled points keep their value from peel time.
struct PeelState {
    std::vector<char> active;      // 1 while unpeeled
    std::vector<double> b;         // density influence at the most recent iteration seen
    std::vector<double> b0;        // first-iteration density influence (confidence values)
    std::vector<char> border;      // border flags of the most recent classification
    std::vector<double> l;         // association thresholds
    std::vector<int> rho;          // associated non-border point id, -1 when unassigned
    std::vector<int> peeled_at;    // 1-based peel iteration, -1 while active
    double lambda = 0.0;           // resolved maximal threshold

    explicit PeelState(int n, double lambda_value);

    int active_count() const;
    std::vector<int> active_ids() const;
    std::vector<int> core_ids() const { return active_ids(); }
    std::vector<int> peeled_ids() const;
};

struct IterationRecord {
    int iteration = 0;             // 1-based
    std::vector<int> peeled_ids;   // ascending; the candidate set when !applied
    double tau = 0.0;
    double mean_peeled_b = 0.0;
    bool applied = false;          // false for the final, rolled-back iteration
};

enum class TerminationReason { kRatioRule, kMaxIterations, kExhausted };

const char* to_string(TerminationReason reason);
TerminationReason termination_reason_from_string(const std::string& s);

struct PeelingTrace {
    std::vector<IterationRecord> iterations;
    int iterations_applied = 0;  // T
    TerminationReason reason = TerminationReason::kMaxIterations;
};

// lambda = mean + population std of the pooled k-neighborhood distances of
// every point, over the full input set. Requires n > k.
double estimate_lambda(const PointSet& points, int k);

// b_i = sum over reverse neighbors j of exp(-||x_i - x_j||^2 / sigma_j^2),
// where sigma_j is the distance from x_j to its k-th nearest active
// neighbor; 0 for points with no reverse neighbors. Values are indexed by
// active position of `index`.
std::vector<double> density_influence(const NeighborIndex& index, const ReverseNeighborMap& rmap,
                                      int k);
std::vector<double> density_influence(const NeighborIndex& index,
                                      const std::vector<std::vector<Neighbor>>& knn_lists,
                                      const ReverseNeighborMap& rmap);

// Nearest-rank percentile cut: tau is the ceil(fraction * m)-th smallest b,
// and every b <= tau is border. At least one point is always classified.
std::pair<std::vector<char>, double> classify_border(std::span<const double> b,
                                                     double peel_fraction);

// Assign each current border point its nearest non-border active point
// within its threshold l (ties to the lower id) and, when assigned, write
// the association distance back into l.
void associate_borders(const NeighborIndex& index, PeelState& state);

// Recompute thresholds of surviving points from the k nearest already-peeled
// points: l' = C * mean(l of those points), clamped to lambda. With fewer
// than k peeled points the mean runs over the available ones; with none the
// thresholds stay untouched.
void update_thresholds(const PointSet& points, PeelState& state, const PeelParams& params);

// Ratio stop rule over the recorded mean peeled-b series (the last entry is
// the not-yet-applied candidate iteration): fires when at least two
// well-defined preceding ratios exist and the current ratio exceeds their
// mean by `sensitivity` population standard deviations.
bool should_terminate(const PeelingTrace& trace, double sensitivity);

// The full loop: identify -> associate -> peel -> update thresholds, until
// the ratio rule fires (that iteration's peel is rolled back), the active
// set would drop below k + 2 points, or max_iterations is reached.
// Requires n > k + 2.
std::pair<PeelState, PeelingTrace> run_peeling(const PointSet& points, const PeelParams& params);

}  // namespace bp
