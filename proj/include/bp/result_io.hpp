#pragma once

#include <string>

#include <json.hpp>

#include "bp/clustering.hpp"

namespace bp {

// Core result block: labels, cluster/noise counts, core ids, confidence,
// per-iteration trace, lambda, and the termination reason. Callers may add
// "params", "score", and "input" blocks before writing.
nlohmann::json result_to_json(const ClusteringResult& result);

// Schema check run on every document before writing and after reading;
// throws ValidationError with the offending key in the message.
void validate_result_json(const nlohmann::json& doc);

void write_result_json(const nlohmann::json& doc, const std::string& path);
nlohmann::json read_result_json(const std::string& path);

// Rebuilds the in-memory result from a validated document (inverse of
// result_to_json for the core block).
ClusteringResult result_from_json(const nlohmann::json& doc);

// Single label per line, aligned with the input row order.
void write_labels_csv(const ClusterLabels& labels, const std::string& path);

}  // namespace bp
