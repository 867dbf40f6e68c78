#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <vector>

#include "bp/clustering.hpp"
#include "bp/dataset.hpp"
#include "bp/errors.hpp"
#include "bp/experiments.hpp"
#include "bp/metrics.hpp"
#include "bp/peeling.hpp"

namespace py = pybind11;
using namespace bp;

namespace {

PointSet to_point_set(const std::vector<std::vector<double>>& rows,
                      std::optional<std::vector<int>> labels = std::nullopt) {
    if (rows.empty()) throw ValidationError("points must not be empty");
    const int d = int(rows.front().size());
    if (d < 1) throw ValidationError("points need at least one coordinate");
    std::vector<double> coords;
    coords.reserve(rows.size() * std::size_t(d));
    for (const auto& row : rows) {
        if (int(row.size()) != d) throw ValidationError("all points need the same dimension");
        coords.insert(coords.end(), row.begin(), row.end());
    }
    return PointSet(std::move(coords), int(rows.size()), d, std::move(labels));
}

std::vector<std::vector<double>> to_rows(const PointSet& points) {
    std::vector<std::vector<double>> rows(points.size());
    for (int i = 0; i < points.size(); ++i) {
        auto p = points.point(i);
        rows[i].assign(p.begin(), p.end());
    }
    return rows;
}

py::dict result_dict(const ClusteringResult& result) {
    py::dict out;
    out["labels"] = result.labels.labels();
    out["n_clusters"] = result.n_clusters();
    out["n_noise"] = result.n_noise();
    out["core_ids"] = result.core_ids;
    out["confidence"] = result.confidence;
    out["lambda"] = result.lambda;
    out["iterations"] = result.trace.iterations_applied;
    out["termination_reason"] = std::string(to_string(result.trace.reason));
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Border-peeling clustering: iterative density-influence peeling with "
              "reachability-based core merging";

    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const IoError& e) {
            PyErr_SetString(PyExc_OSError, e.what());
        } catch (const ValidationError& e) {  // covers parse failures
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const DegenerateInputError& e) {
            PyErr_SetString(PyExc_ValueError, e.what());
        } catch (const Error& e) {
            PyErr_SetString(PyExc_RuntimeError, e.what());
        }
    });

    py::class_<PeelParams>(m, "PeelParams", "Tuning knobs of the peeling loop")
        .def(py::init<>())
        .def_readwrite("k", &PeelParams::k, "neighborhood size")
        .def_readwrite("threshold_strictness", &PeelParams::threshold_strictness,
                       "association threshold multiplier")
        .def_readwrite("peel_fraction", &PeelParams::peel_fraction,
                       "share of active points peeled per iteration")
        .def_readwrite("lambda_", &PeelParams::lambda,
                       "association radius cap; estimated from the data when unset")
        .def_readwrite("max_iterations", &PeelParams::max_iterations)
        .def_readwrite("termination_sensitivity", &PeelParams::termination_sensitivity,
                       "z-score threshold of the stop rule")
        .def("__repr__", [](const PeelParams& p) {
            return "PeelParams(k=" + std::to_string(p.k) +
                   ", peel_fraction=" + std::to_string(p.peel_fraction) + ")";
        });

    m.def(
        "cluster",
        [](const std::vector<std::vector<double>>& points, const PeelParams& params,
           std::optional<int> min_cluster_size) {
            return result_dict(bp::cluster(to_point_set(points), {params, min_cluster_size}));
        },
        py::arg("points"), py::arg("params") = PeelParams{},
        py::arg("min_cluster_size") = py::none(),
        "Cluster points; returns labels (-1 marks noise), cores, confidence, and "
        "the run's trace summary as a dict");

    m.def(
        "estimate_lambda",
        [](const std::vector<std::vector<double>>& points, int k) {
            return estimate_lambda(to_point_set(points), k);
        },
        py::arg("points"), py::arg("k") = 20,
        "Mean plus standard deviation of all k-nearest-neighbor distances");

    m.def("adjusted_rand_index",
          py::overload_cast<const std::vector<int>&, const std::vector<int>&>(
              &adjusted_rand_index),
          py::arg("a"), py::arg("b"),
          "Chance-adjusted pair-counting agreement; -1 entries count as singletons");

    m.def("adjusted_mutual_information",
          py::overload_cast<const std::vector<int>&, const std::vector<int>&>(
              &adjusted_mutual_information),
          py::arg("a"), py::arg("b"),
          "Mutual information adjusted by its permutation-model expectation");

    m.def("lemma1_expectation", &lemma1_expectation, py::arg("x"), py::arg("n"),
          "Closed-form expected density influence at x for n uniform points on [-1, 1]");

    m.def(
        "gaussian_mixture",
        [](const std::vector<std::vector<double>>& means, const std::vector<double>& variances,
           const std::vector<int>& counts, std::uint64_t seed) {
            if (means.size() != variances.size() || means.size() != counts.size())
                throw ValidationError("means, variances, and counts must align");
            std::vector<GaussianComponent> comps;
            for (std::size_t i = 0; i < means.size(); ++i)
                comps.push_back(GaussianComponent::isotropic(means[i], variances[i], counts[i]));
            PointSet pts = generate(GeneratorSpec::gaussian_mixture(std::move(comps), seed));
            return py::make_tuple(to_rows(pts), *pts.ground_truth());
        },
        py::arg("means"), py::arg("variances"), py::arg("counts"), py::arg("seed") = 0,
        "Sample isotropic Gaussian blobs; returns (points, component_labels)");

    m.def(
        "uniform_interval",
        [](double low, double high, int count, std::uint64_t seed) {
            PointSet pts = generate(GeneratorSpec::uniform_interval(low, high, count, seed));
            std::vector<double> xs(pts.coords().begin(), pts.coords().end());
            return xs;
        },
        py::arg("low") = -1.0, py::arg("high") = 1.0, py::arg("count") = 50,
        py::arg("seed") = 0, "Sample one-dimensional uniform points on [low, high)");

    m.def(
        "load_csv",
        [](const std::string& path, bool has_header, std::optional<int> label_column) {
            PointSet pts = load_csv(path, has_header, label_column);
            py::object labels = py::none();
            if (pts.has_ground_truth()) labels = py::cast(*pts.ground_truth());
            return py::make_tuple(to_rows(pts), labels);
        },
        py::arg("path"), py::arg("has_header") = false, py::arg("label_column") = py::none(),
        "Read numeric CSV rows; returns (points, labels_or_None)");

    m.def(
        "validate_lemma",
        [](int n, int trials, int bins, std::uint64_t seed) {
            auto rep = run_lemma_validation(n, trials, bins, seed);
            py::list table;
            for (const auto& row : rep.table) {
                py::dict r;
                r["center"] = row.center;
                r["empirical"] = row.empirical;
                r["analytic"] = row.analytic;
                r["abs_error"] = row.abs_error;
                r["samples"] = row.samples;
                table.append(std::move(r));
            }
            py::dict out;
            out["n"] = rep.n;
            out["trials"] = rep.trials;
            out["seed"] = rep.seed;
            out["table"] = std::move(table);
            out["max_abs_error"] = rep.max_abs_error;
            return out;
        },
        py::arg("n") = 50, py::arg("trials") = 1000, py::arg("bins") = 21, py::arg("seed") = 0,
        "Compare sampled density influence with the closed-form expectation");

    m.attr("NOISE") = int(ClusterLabels::kNoise);
    m.attr("__version__") = "0.1.0";
}
