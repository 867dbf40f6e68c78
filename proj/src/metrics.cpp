#include "bp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "bp/errors.hpp"

namespace bp {

namespace {

// Remap labels to 0..m-1, giving every -1 its own fresh class.
std::vector<int> expand_noise(const std::vector<int>& labels) {
    std::map<int, int> remap;
    for (int v : labels) {
        if (v < -1) throw ValidationError("labels must be non-negative or the -1 noise sentinel");
        if (v >= 0) remap.emplace(v, 0);
    }
    int next = 0;
    for (auto& [value, index] : remap) index = next++;

    std::vector<int> out(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        out[i] = labels[i] >= 0 ? remap[labels[i]] : next++;
    return out;
}

long long pairs_of(long long c) { return c * (c - 1) / 2; }

double entropy(const std::vector<long long>& sums, long long total) {
    double h = 0.0;
    for (long long s : sums) {
        if (s == 0) continue;
        double p = double(s) / double(total);
        h -= p * std::log(p);
    }
    return h;
}

// Expected mutual information under the permutation model: hypergeometric
// sum per marginal pair, accumulated in log space for stability.
double expected_mutual_information(const ContingencyTable& t) {
    const double n = double(t.total);
    const long long ntot = t.total;
    auto lf = [](long long x) { return std::lgamma(double(x) + 1.0); };

    double emi = 0.0;
    for (long long a : t.row_sums) {
        for (long long b : t.col_sums) {
            const long long lo = std::max(1LL, a + b - ntot);
            const long long hi = std::min(a, b);
            for (long long nij = lo; nij <= hi; ++nij) {
                double log_p = lf(a) + lf(b) + lf(ntot - a) + lf(ntot - b) - lf(ntot) -
                               lf(nij) - lf(a - nij) - lf(b - nij) - lf(ntot - a - b + nij);
                double term = double(nij) / n * std::log(n * double(nij) / (double(a) * double(b)));
                emi += term * std::exp(log_p);
            }
        }
    }
    return emi;
}

}  // namespace

ContingencyTable ContingencyTable::from_labels(const std::vector<int>& a,
                                               const std::vector<int>& b) {
    if (a.size() != b.size()) throw ValidationError("labelings must have equal length");
    if (a.empty()) throw ValidationError("labelings must not be empty");

    auto u = expand_noise(a);
    auto v = expand_noise(b);
    int r = *std::max_element(u.begin(), u.end()) + 1;
    int c = *std::max_element(v.begin(), v.end()) + 1;

    ContingencyTable t;
    t.counts.assign(r, std::vector<long long>(c, 0));
    t.row_sums.assign(r, 0);
    t.col_sums.assign(c, 0);
    t.total = (long long)a.size();
    for (std::size_t i = 0; i < u.size(); ++i) {
        ++t.counts[u[i]][v[i]];
        ++t.row_sums[u[i]];
        ++t.col_sums[v[i]];
    }
    return t;
}

bool ContingencyTable::identical_partitions() const {
    std::vector<int> row_nonzero(counts.size(), 0);
    std::vector<int> col_nonzero(col_sums.size(), 0);
    for (std::size_t i = 0; i < counts.size(); ++i)
        for (std::size_t j = 0; j < counts[i].size(); ++j)
            if (counts[i][j] > 0) {
                if (++row_nonzero[i] > 1) return false;
                if (++col_nonzero[j] > 1) return false;
            }
    return true;
}

double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    auto t = ContingencyTable::from_labels(a, b);

    // Integer-exact form: ARI = 2(P*S_c - S_a*S_b) / (P(S_a+S_b) - 2 S_a S_b)
    // with P = C(n,2) and S_* the pair counts. Identical to the pair-counting
    // definition term for term, so oracle comparisons can demand equality.
    __int128 sum_c = 0, sum_a = 0, sum_b = 0;
    for (const auto& row : t.counts)
        for (long long cell : row) sum_c += pairs_of(cell);
    for (long long s : t.row_sums) sum_a += pairs_of(s);
    for (long long s : t.col_sums) sum_b += pairs_of(s);
    const __int128 P = pairs_of(t.total);

    __int128 num = 2 * (P * sum_c - sum_a * sum_b);
    __int128 den = P * (sum_a + sum_b) - 2 * sum_a * sum_b;
    // den vanishes only when both labelings are all singletons, both are a
    // single cluster, or n < 2 -- identical partitions in every case.
    if (den == 0) return 1.0;
    return double(num) / double(den);
}

double adjusted_rand_index(const ClusterLabels& a, const ClusterLabels& b) {
    return adjusted_rand_index(a.labels(), b.labels());
}

double adjusted_mutual_information(const std::vector<int>& a, const std::vector<int>& b) {
    auto t = ContingencyTable::from_labels(a, b);
    const double n = double(t.total);

    double hu = entropy(t.row_sums, t.total);
    double hv = entropy(t.col_sums, t.total);
    if (hu == 0.0 || hv == 0.0) return t.identical_partitions() ? 1.0 : 0.0;

    double mi = 0.0;
    for (std::size_t i = 0; i < t.counts.size(); ++i) {
        for (std::size_t j = 0; j < t.counts[i].size(); ++j) {
            long long nij = t.counts[i][j];
            if (nij == 0) continue;
            mi += double(nij) / n *
                  std::log(n * double(nij) / (double(t.row_sums[i]) * double(t.col_sums[j])));
        }
    }

    double emi = expected_mutual_information(t);
    double den = std::max(hu, hv) - emi;
    if (den == 0.0) return 0.0;
    return (mi - emi) / den;
}

double adjusted_mutual_information(const ClusterLabels& a, const ClusterLabels& b) {
    return adjusted_mutual_information(a.labels(), b.labels());
}

ScoreReport score_run(const ClusteringResult& result, const std::vector<int>& truth) {
    if (int(truth.size()) != result.labels.size())
        throw ValidationError("ground truth length does not match the clustering");
    ScoreReport report;
    report.ari = adjusted_rand_index(result.labels.labels(), truth);
    report.ami = adjusted_mutual_information(result.labels.labels(), truth);
    report.n_clusters_found = result.n_clusters();
    report.n_noise = result.n_noise();
    return report;
}

ScoreReport score_run(const ClusteringResult& result, const ClusterLabels& truth) {
    return score_run(result, truth.labels());
}

}  // namespace bp
