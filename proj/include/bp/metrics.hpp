#pragma once

#include <vector>

#include "bp/clustering.hpp"
#include "bp/pointset.hpp"

namespace bp {

// Cross-tabulation of two labelings. Noise points (-1) enter as one fresh
// singleton class each, so spurious noise is penalized instead of ignored.
struct ContingencyTable {
    std::vector<std::vector<long long>> counts;  // r x c
    std::vector<long long> row_sums;
    std::vector<long long> col_sums;
    long long total = 0;

    static ContingencyTable from_labels(const std::vector<int>& a, const std::vector<int>& b);

    // True when the two labelings induce the same partition (at most one
    // nonzero cell in every row and column).
    bool identical_partitions() const;
};

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_rand_index(const ClusterLabels& a, const ClusterLabels& b);

double adjusted_mutual_information(const std::vector<int>& a, const std::vector<int>& b);
double adjusted_mutual_information(const ClusterLabels& a, const ClusterLabels& b);

struct ScoreReport {
    double ari = 0.0;
    double ami = 0.0;
    int n_clusters_found = 0;
    int n_noise = 0;
};

ScoreReport score_run(const ClusteringResult& result, const ClusterLabels& truth);
ScoreReport score_run(const ClusteringResult& result, const std::vector<int>& truth);

}  // namespace bp
