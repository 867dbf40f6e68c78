#include "bp/peeling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "bp/errors.hpp"
#include "bp/parallel.hpp"

namespace bp {

namespace {

double mean_of(std::span<const double> values) {
    return std::accumulate(values.begin(), values.end(), 0.0) / double(values.size());
}

double population_std(std::span<const double> values, double mean) {
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / double(values.size()));
}

}  // namespace

void PeelParams::validate() const {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (!(threshold_strictness > 0.0) || !std::isfinite(threshold_strictness))
        throw ValidationError("threshold strictness must be a positive finite value");
    if (!(peel_fraction > 0.0) || !(peel_fraction < 1.0))
        throw ValidationError("peel fraction must lie strictly between 0 and 1");
    if (lambda && (!(*lambda > 0.0) || !std::isfinite(*lambda)))
        throw ValidationError("lambda must be a positive finite value");
    if (max_iterations < 1) throw ValidationError("max iterations must be at least 1");
    if (!(termination_sensitivity >= 0.0) || !std::isfinite(termination_sensitivity))
        throw ValidationError("termination sensitivity must be a non-negative finite value");
}

PeelState::PeelState(int n, double lambda_value)
    : active(n, 1),
      b(n, 0.0),
      b0(n, 0.0),
      border(n, 0),
      l(n, lambda_value),
      rho(n, -1),
      peeled_at(n, -1),
      lambda(lambda_value) {
    if (n < 1) throw ValidationError("peel state needs at least one point");
}

int PeelState::active_count() const {
    return int(std::count(active.begin(), active.end(), char(1)));
}

std::vector<int> PeelState::active_ids() const {
    std::vector<int> ids;
    for (int i = 0; i < int(active.size()); ++i)
        if (active[i]) ids.push_back(i);
    return ids;
}

std::vector<int> PeelState::peeled_ids() const {
    std::vector<int> ids;
    for (int i = 0; i < int(active.size()); ++i)
        if (!active[i]) ids.push_back(i);
    return ids;
}

const char* to_string(TerminationReason reason) {
    switch (reason) {
        case TerminationReason::kRatioRule: return "ratio-rule";
        case TerminationReason::kMaxIterations: return "max-iterations";
        case TerminationReason::kExhausted: return "exhausted";
    }
    throw ValidationError("unknown termination reason");
}

TerminationReason termination_reason_from_string(const std::string& s) {
    if (s == "ratio-rule") return TerminationReason::kRatioRule;
    if (s == "max-iterations") return TerminationReason::kMaxIterations;
    if (s == "exhausted") return TerminationReason::kExhausted;
    throw ValidationError("unknown termination reason: " + s);
}

double estimate_lambda(const PointSet& points, int k) {
    if (k < 1) throw ValidationError("k must be at least 1");
    if (points.size() <= k)
        throw DegenerateInputError("lambda estimation needs more than k points");
    NeighborIndex index(points, all_ids(points));
    auto lists = index.all_knn(k);
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& list : lists) {
        for (const auto& nb : list) sum += nb.distance;
        count += list.size();
    }
    double mean = sum / double(count);
    double ss = 0.0;
    for (const auto& list : lists)
        for (const auto& nb : list) ss += (nb.distance - mean) * (nb.distance - mean);
    return mean + std::sqrt(ss / double(count));
}

std::vector<double> density_influence(const NeighborIndex& index,
                                      const std::vector<std::vector<Neighbor>>& knn_lists,
                                      const ReverseNeighborMap& rmap) {
    const PointSet& points = index.points();
    const auto& ids = index.active_ids();
    const int m = index.active_count();
    if (int(knn_lists.size()) != m)
        throw ValidationError("neighbor lists do not match the active set");

    // Position lookup and squared kernel bandwidths, both by global id.
    std::vector<double> sigma2(points.size(), 0.0);
    for (int p = 0; p < m; ++p) {
        if (knn_lists[p].empty())
            throw ValidationError("neighbor lists must not be empty");
        double s = knn_lists[p].back().distance;
        sigma2[ids[p]] = s * s;
    }

    std::vector<double> b(m, 0.0);
    parallel_for(m, [&](int p) {
        const int i = ids[p];
        double acc = 0.0;
        for (int j : rmap[i]) {
            double d2 = squared_distance(points, i, j);
            // Coincident points contribute the kernel's limit value 1 even
            // when the bandwidth collapses to zero.
            acc += d2 == 0.0 ? 1.0 : std::exp(-d2 / sigma2[j]);
        }
        b[p] = acc;
    });
    return b;
}

std::vector<double> density_influence(const NeighborIndex& index, const ReverseNeighborMap& rmap,
                                      int k) {
    return density_influence(index, index.all_knn(k), rmap);
}

std::pair<std::vector<char>, double> classify_border(std::span<const double> b,
                                                     double peel_fraction) {
    const int m = int(b.size());
    if (m < 1) throw ValidationError("border classification needs at least one value");
    if (!(peel_fraction > 0.0) || !(peel_fraction < 1.0))
        throw ValidationError("peel fraction must lie strictly between 0 and 1");
    // Nearest-rank cutoff. The small backoff keeps representation error of
    // the fraction (e.g. 0.14 * 50 landing just above 7) from inflating the
    // rank by one.
    int rank = int(std::ceil(peel_fraction * m - 1e-9));
    rank = std::clamp(rank, 1, m);

    std::vector<double> sorted(b.begin(), b.end());
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    double tau = sorted[rank - 1];

    std::vector<char> border(m, 0);
    for (int i = 0; i < m; ++i) border[i] = b[i] <= tau ? 1 : 0;
    return {std::move(border), tau};
}

void associate_borders(const NeighborIndex& index, PeelState& state) {
    std::vector<int> border_ids;
    for (int i = 0; i < int(state.active.size()); ++i)
        if (state.active[i] && state.border[i]) border_ids.push_back(i);

    parallel_for(int(border_ids.size()), [&](int idx) {
        const int i = border_ids[idx];
        state.rho[i] = -1;
        for (const auto& nb : index.radius(i, state.l[i])) {
            if (state.border[nb.id]) continue;
            state.rho[i] = nb.id;
            state.l[i] = nb.distance;
            break;
        }
    });
}

void update_thresholds(const PointSet& points, PeelState& state, const PeelParams& params) {
    auto peeled = state.peeled_ids();
    if (peeled.empty()) return;
    auto survivors = state.active_ids();

    if (peeled.size() == 1) {
        // A single peeled point is every survivor's whole neighborhood.
        double value = std::min(params.threshold_strictness * state.l[peeled[0]], state.lambda);
        for (int i : survivors) state.l[i] = value;
        return;
    }

    NeighborIndex peeled_index(points, peeled);
    const int k = std::min(params.k, int(peeled.size()));
    parallel_for(int(survivors.size()), [&](int idx) {
        const int i = survivors[idx];
        double sum = 0.0;
        auto nearest = peeled_index.knn_at(points.point(i), k);
        for (const auto& nb : nearest) sum += state.l[nb.id];
        double updated = params.threshold_strictness * (sum / double(nearest.size()));
        state.l[i] = std::min(updated, state.lambda);
    });
}

bool should_terminate(const PeelingTrace& trace, double sensitivity) {
    const auto& recs = trace.iterations;
    const int t = int(recs.size());
    if (t < 4) return false;

    auto ratio_at = [&](int idx) -> std::optional<double> {  // idx >= 1
        double prev = recs[idx - 1].mean_peeled_b;
        if (!(prev > 0.0)) return std::nullopt;
        return recs[idx].mean_peeled_b / prev;
    };

    auto current = ratio_at(t - 1);
    if (!current) return false;

    std::vector<double> preceding;
    for (int idx = 1; idx < t - 1; ++idx)
        if (auto r = ratio_at(idx)) preceding.push_back(*r);
    if (preceding.size() < 2) return false;

    double mean = mean_of(preceding);
    double std = population_std(preceding, mean);
    return *current > mean + sensitivity * std;
}

std::pair<PeelState, PeelingTrace> run_peeling(const PointSet& points, const PeelParams& params) {
    params.validate();
    const int n = points.size();
    if (n < params.k + 3)
        throw DegenerateInputError("peeling needs more than k + 2 points");

    double lambda = params.lambda ? *params.lambda : estimate_lambda(points, params.k);
    PeelState state(n, lambda);
    PeelingTrace trace;
    trace.reason = TerminationReason::kMaxIterations;

    for (int iter = 1; iter <= params.max_iterations; ++iter) {
        auto ids = state.active_ids();
        const int m = int(ids.size());
        NeighborIndex index(points, ids);

        const int k = std::min(params.k, m - 1);
        auto knn_lists = index.all_knn(k);
        auto rmap = reverse_knn_from_lists(index, knn_lists);
        auto b = density_influence(index, knn_lists, rmap);

        for (int p = 0; p < m; ++p) state.b[ids[p]] = b[p];
        if (iter == 1)
            for (int p = 0; p < m; ++p) state.b0[ids[p]] = b[p];

        auto [border, tau] = classify_border(b, params.peel_fraction);
        IterationRecord rec;
        rec.iteration = iter;
        rec.tau = tau;
        double peeled_sum = 0.0;
        for (int p = 0; p < m; ++p) {
            if (border[p]) {
                rec.peeled_ids.push_back(ids[p]);
                peeled_sum += b[p];
            }
        }
        rec.mean_peeled_b = peeled_sum / double(rec.peeled_ids.size());
        trace.iterations.push_back(std::move(rec));

        if (should_terminate(trace, params.termination_sensitivity)) {
            trace.reason = TerminationReason::kRatioRule;
            break;  // the candidate stays recorded but unapplied
        }
        if (m - int(trace.iterations.back().peeled_ids.size()) < params.k + 2) {
            trace.reason = TerminationReason::kExhausted;
            break;  // applying the peel would leave too few points to continue
        }

        for (int p = 0; p < m; ++p) state.border[ids[p]] = border[p];
        associate_borders(index, state);
        for (int id : trace.iterations.back().peeled_ids) {
            state.active[id] = 0;
            state.peeled_at[id] = iter;
        }
        update_thresholds(points, state, params);
        trace.iterations.back().applied = true;
        trace.iterations_applied = iter;
    }

    return {std::move(state), std::move(trace)};
}

}  // namespace bp
