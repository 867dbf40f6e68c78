#include "bp/experiments.hpp"

#include <algorithm>
#include <cmath>

#include "bp/clustering.hpp"
#include "bp/dataset.hpp"
#include "bp/errors.hpp"
#include "bp/metrics.hpp"
#include "bp/neighbors.hpp"
#include "bp/parallel.hpp"
#include "bp/rng.hpp"

namespace bp {

namespace {

// Composite Simpson average of the analytic expectation over one bin. The
// expectation is compared bin-by-bin against binned Monte-Carlo means, so
// the fair analytic reference is the same average, not the midpoint value.
double analytic_bin_average(double lo, double hi, int n) {
    constexpr int kIntervals = 256;  // even
    double h = (hi - lo) / kIntervals;
    double acc = lemma1_expectation(lo, n) + lemma1_expectation(hi, n);
    for (int i = 1; i < kIntervals; ++i)
        acc += lemma1_expectation(lo + i * h, n) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0 / (hi - lo);
}

}  // namespace

LemmaReport run_lemma_validation(int n, int trials, int bins, std::uint64_t seed) {
    if (n < 2) throw ValidationError("lemma validation needs n >= 2");
    if (trials < 1) throw ValidationError("lemma validation needs at least one trial");
    if (bins < 1) throw ValidationError("lemma validation needs at least one bin");

    // Per-trial partial sums keep the reduction order fixed regardless of
    // how many workers ran the trials.
    std::vector<std::vector<double>> sums(trials, std::vector<double>(bins, 0.0));
    std::vector<std::vector<long long>> counts(trials, std::vector<long long>(bins, 0));

    parallel_for(trials, [&](int t) {
        std::mt19937_64 gen(mix_seed(seed, std::uint64_t(t)));
        std::vector<double> xs(n);
        for (double& x : xs) x = uniform_in(gen, -1.0, 1.0);

        PointSet points(std::vector<double>(xs), n, 1);
        NeighborIndex index(points, all_ids(points));
        auto knn_lists = index.all_knn(1);
        auto rmap = reverse_knn_from_lists(index, knn_lists);
        auto b = density_influence(index, knn_lists, rmap);

        for (int i = 0; i < n; ++i) {
            int bin = std::min(int((xs[i] + 1.0) / 2.0 * bins), bins - 1);
            sums[t][bin] += b[i];
            ++counts[t][bin];
        }
    }, /*serial_below=*/2);

    LemmaReport report;
    report.n = n;
    report.trials = trials;
    report.seed = seed;
    report.table.resize(bins);
    std::vector<double> total(bins, 0.0);
    std::vector<long long> hits(bins, 0);
    for (int t = 0; t < trials; ++t)
        for (int bin = 0; bin < bins; ++bin) {
            total[bin] += sums[t][bin];
            hits[bin] += counts[t][bin];
        }

    // The closed form states the expected influence per unit point density:
    // with k = 1 every reverse neighbor contributes exactly 1/e, so the raw
    // per-point mean sits near 1/e while the formula carries an extra mean
    // spacing factor of 2/n. Normalizing the sampled means by that spacing
    // puts both columns on the same scale.
    const double spacing = 2.0 / n;
    const double width = 2.0 / bins;
    for (int bin = 0; bin < bins; ++bin) {
        LemmaBin& row = report.table[bin];
        row.center = -1.0 + (bin + 0.5) * width;
        row.samples = hits[bin];
        row.analytic = analytic_bin_average(-1.0 + bin * width, -1.0 + (bin + 1) * width, n);
        if (hits[bin] > 0) {
            row.empirical = total[bin] / double(hits[bin]) * spacing;
            row.abs_error = std::abs(row.empirical - row.analytic);
            report.max_abs_error = std::max(report.max_abs_error, row.abs_error);
        }
    }
    return report;
}

SweepReport run_sweep(const std::function<PointSet(int)>& dataset_for_repeat,
                      const PeelParams& base, std::optional<int> min_cluster_size,
                      const std::vector<double>& lambda_offsets,
                      const std::vector<double>& peel_fractions, int repeats) {
    if (lambda_offsets.empty()) throw ValidationError("sweep needs at least one lambda offset");
    if (peel_fractions.empty()) throw ValidationError("sweep needs at least one peel fraction");
    if (repeats < 1) throw ValidationError("sweep needs at least one repeat");

    const int n_offsets = int(lambda_offsets.size());
    const int n_fractions = int(peel_fractions.size());
    const int jobs = n_offsets * n_fractions * repeats;

    struct JobResult {
        double ari = 0.0, ami = 0.0;
        int clusters = 0;
    };
    std::vector<JobResult> results(jobs);

    parallel_for(jobs, [&](int job) {
        const int rep = job % repeats;
        const int cell = job / repeats;
        const int fraction_idx = cell % n_fractions;
        const int offset_idx = cell / n_fractions;

        PointSet points = dataset_for_repeat(rep);
        if (!points.has_ground_truth())
            throw ValidationError("sweep scoring needs ground-truth labels");

        PeelParams params = base;
        params.peel_fraction = peel_fractions[fraction_idx];
        double lambda = estimate_lambda(points, params.k) + lambda_offsets[offset_idx];
        if (!(lambda > 0.0))
            throw ValidationError("lambda offset drives the threshold non-positive");
        params.lambda = lambda;

        auto result = cluster(points, {params, min_cluster_size});
        auto score = score_run(result, *points.ground_truth());
        results[job] = {score.ari, score.ami, score.n_clusters_found};
    }, /*serial_below=*/2);

    SweepReport report;
    report.repeats = repeats;
    for (int cell = 0; cell < n_offsets * n_fractions; ++cell) {
        SweepCell out;
        out.lambda_offset = lambda_offsets[cell / n_fractions];
        out.peel_fraction = peel_fractions[cell % n_fractions];
        double sum_ari = 0.0, sum_ami = 0.0, sum_clusters = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            const JobResult& r = results[cell * repeats + rep];
            sum_ari += r.ari;
            sum_ami += r.ami;
            sum_clusters += r.clusters;
        }
        out.mean_ari = sum_ari / repeats;
        out.mean_ami = sum_ami / repeats;
        out.mean_clusters = sum_clusters / repeats;
        double ss_ari = 0.0, ss_ami = 0.0;
        for (int rep = 0; rep < repeats; ++rep) {
            const JobResult& r = results[cell * repeats + rep];
            ss_ari += (r.ari - out.mean_ari) * (r.ari - out.mean_ari);
            ss_ami += (r.ami - out.mean_ami) * (r.ami - out.mean_ami);
        }
        out.std_ari = std::sqrt(ss_ari / repeats);
        out.std_ami = std::sqrt(ss_ami / repeats);
        report.cells.push_back(out);
    }
    return report;
}

}  // namespace bp
