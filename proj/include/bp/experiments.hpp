#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bp/peeling.hpp"
#include "bp/pointset.hpp"

namespace bp {

struct LemmaBin {
    double center = 0.0;
    double empirical = 0.0;  // mean influence of samples in the bin, scaled by the 2/n spacing
    double analytic = 0.0;   // closed-form expectation averaged over the bin
    double abs_error = 0.0;
    long long samples = 0;
};

struct LemmaReport {
    int n = 0;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<LemmaBin> table;
    double max_abs_error = 0.0;  // over non-empty bins
};

// Monte-Carlo check of the expected density influence for uniform 1-D data
// with k = 1: `trials` samples of n points on [-1, 1], influences pooled
// into equal-width bins and compared against the analytic expectation.
LemmaReport run_lemma_validation(int n, int trials, int bins, std::uint64_t seed);

struct SweepCell {
    double lambda_offset = 0.0;
    double peel_fraction = 0.0;
    double mean_ari = 0.0;
    double std_ari = 0.0;
    double mean_ami = 0.0;
    double std_ami = 0.0;
    double mean_clusters = 0.0;
};

struct SweepReport {
    std::vector<SweepCell> cells;  // offsets outer, fractions inner
    int repeats = 0;
};

// Parameter-sensitivity grid: every (lambda offset, peel fraction) cell runs
// `repeats` times on the datasets the provider yields per repeat (labels
// required), scoring each run against ground truth. Lambda is re-estimated
// per dataset and shifted by the cell's offset.
SweepReport run_sweep(const std::function<PointSet(int)>& dataset_for_repeat,
                      const PeelParams& base, std::optional<int> min_cluster_size,
                      const std::vector<double>& lambda_offsets,
                      const std::vector<double>& peel_fractions, int repeats);

}  // namespace bp
