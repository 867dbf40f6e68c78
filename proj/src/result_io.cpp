#include "bp/result_io.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "bp/errors.hpp"
#include "bp/peeling.hpp"

namespace bp {

namespace {

using nlohmann::json;

[[noreturn]] void schema_fail(const std::string& what) {
    throw ValidationError("result schema: " + what);
}

const json& require(const json& doc, const char* key) {
    auto it = doc.find(key);
    if (it == doc.end()) schema_fail(std::string("missing key '") + key + "'");
    return *it;
}

long long require_int(const json& doc, const char* key) {
    const json& v = require(doc, key);
    if (!v.is_number_integer()) schema_fail(std::string("'") + key + "' must be an integer");
    return v.get<long long>();
}

double require_number(const json& doc, const char* key) {
    const json& v = require(doc, key);
    if (!v.is_number()) schema_fail(std::string("'") + key + "' must be a number");
    return v.get<double>();
}

void check_int_array(const json& v, const char* key) {
    if (!v.is_array()) schema_fail(std::string("'") + key + "' must be an array");
    for (const auto& e : v)
        if (!e.is_number_integer())
            schema_fail(std::string("'") + key + "' must contain only integers");
}

}  // namespace

nlohmann::json result_to_json(const ClusteringResult& result) {
    json iterations = json::array();
    for (const auto& rec : result.trace.iterations) {
        iterations.push_back({{"iteration", rec.iteration},
                              {"peeled_ids", rec.peeled_ids},
                              {"tau", rec.tau},
                              {"mean_peeled_b", rec.mean_peeled_b},
                              {"applied", rec.applied}});
    }
    return json{{"labels", result.labels.labels()},
                {"n_clusters", result.n_clusters()},
                {"n_noise", result.n_noise()},
                {"core_ids", result.core_ids},
                {"confidence", result.confidence},
                {"iterations", std::move(iterations)},
                {"lambda", result.lambda},
                {"termination_reason", to_string(result.trace.reason)}};
}

void validate_result_json(const nlohmann::json& doc) {
    if (!doc.is_object()) schema_fail("document must be an object");
    static const std::set<std::string> known = {"labels",     "n_clusters", "n_noise",
                                               "core_ids",   "confidence", "iterations",
                                               "lambda",     "termination_reason",
                                               "params",     "score",      "input"};
    for (auto it = doc.begin(); it != doc.end(); ++it)
        if (!known.count(it.key())) schema_fail("unknown key '" + it.key() + "'");

    const json& labels = require(doc, "labels");
    check_int_array(labels, "labels");
    const int n = int(labels.size());
    if (n == 0) schema_fail("'labels' must not be empty");

    const long long n_clusters = require_int(doc, "n_clusters");
    if (n_clusters < 0) schema_fail("'n_clusters' must be non-negative");
    std::set<long long> seen;
    long long noise = 0;
    for (const auto& e : labels) {
        long long v = e.get<long long>();
        if (v == -1) ++noise;
        else if (v < 0 || v >= n_clusters) schema_fail("label out of range");
        else seen.insert(v);
    }
    if (static_cast<long long>(seen.size()) != n_clusters)
        schema_fail("'n_clusters' does not match the labels used");
    if (require_int(doc, "n_noise") != noise) schema_fail("'n_noise' does not match the labels");

    const json& cores = require(doc, "core_ids");
    check_int_array(cores, "core_ids");
    long long prev = -1;
    for (const auto& e : cores) {
        long long v = e.get<long long>();
        if (v <= prev) schema_fail("'core_ids' must be strictly ascending");
        if (v < 0 || v >= n) schema_fail("'core_ids' entry out of range");
        prev = v;
    }

    const json& confidence = require(doc, "confidence");
    if (!confidence.is_array() || int(confidence.size()) != n)
        schema_fail("'confidence' must be an array aligned with 'labels'");
    for (const auto& e : confidence) {
        if (!e.is_number()) schema_fail("'confidence' must contain only numbers");
        double v = e.get<double>();
        if (!std::isfinite(v) || v < 0.0) schema_fail("'confidence' values must be finite and non-negative");
    }

    const json& iterations = require(doc, "iterations");
    if (!iterations.is_array()) schema_fail("'iterations' must be an array");
    int expected_iter = 1;
    for (const auto& rec : iterations) {
        if (!rec.is_object()) schema_fail("'iterations' entries must be objects");
        if (require_int(rec, "iteration") != expected_iter)
            schema_fail("'iterations' must be consecutively numbered from 1");
        check_int_array(require(rec, "peeled_ids"), "peeled_ids");
        require_number(rec, "tau");
        require_number(rec, "mean_peeled_b");
        if (!require(rec, "applied").is_boolean()) schema_fail("'applied' must be a boolean");
        bool applied = rec["applied"].get<bool>();
        if (!applied && expected_iter != int(iterations.size()))
            schema_fail("only the final iteration may be unapplied");
        ++expected_iter;
    }

    double lambda = require_number(doc, "lambda");
    if (!std::isfinite(lambda) || lambda <= 0.0) schema_fail("'lambda' must be positive");

    const json& reason = require(doc, "termination_reason");
    if (!reason.is_string()) schema_fail("'termination_reason' must be a string");
    termination_reason_from_string(reason.get<std::string>());

    if (auto it = doc.find("score"); it != doc.end()) {
        if (!it->is_object()) schema_fail("'score' must be an object");
        require_number(*it, "ari");
        require_number(*it, "ami");
    }
    if (auto it = doc.find("params"); it != doc.end() && !it->is_object())
        schema_fail("'params' must be an object");
}

ClusteringResult result_from_json(const nlohmann::json& doc) {
    validate_result_json(doc);
    PeelingTrace trace;
    for (const auto& rec : doc["iterations"]) {
        IterationRecord out;
        out.iteration = rec["iteration"].get<int>();
        out.peeled_ids = rec["peeled_ids"].get<std::vector<int>>();
        out.tau = rec["tau"].get<double>();
        out.mean_peeled_b = rec["mean_peeled_b"].get<double>();
        out.applied = rec["applied"].get<bool>();
        if (out.applied) trace.iterations_applied = out.iteration;
        trace.iterations.push_back(std::move(out));
    }
    trace.reason = termination_reason_from_string(doc["termination_reason"].get<std::string>());
    return ClusteringResult{ClusterLabels::from_contiguous(doc["labels"].get<std::vector<int>>()),
                            doc["core_ids"].get<std::vector<int>>(),
                            doc["confidence"].get<std::vector<double>>(),
                            std::move(trace),
                            doc["lambda"].get<double>()};
}

void write_result_json(const nlohmann::json& doc, const std::string& path) {
    validate_result_json(doc);
    std::ofstream out(path);
    if (!out) throw IoError("cannot write result file: " + path);
    out << doc.dump(2) << '\n';
    if (!out) throw IoError("failed writing result file: " + path);
}

nlohmann::json read_result_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read result file: " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError("invalid result file " + path + ": " + e.what());
    }
    validate_result_json(doc);
    return doc;
}

void write_labels_csv(const ClusterLabels& labels, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write labels file: " + path);
    for (int i = 0; i < labels.size(); ++i) out << labels[i] << '\n';
    if (!out) throw IoError("failed writing labels file: " + path);
}

}  // namespace bp
