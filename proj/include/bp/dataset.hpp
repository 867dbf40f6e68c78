#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bp/pointset.hpp"

namespace bp {

struct GaussianComponent {
    std::vector<double> mean;
    // Full covariance matrix; diagonal or isotropic inputs are expanded.
    std::vector<std::vector<double>> covariance;
    int count = 0;

    static GaussianComponent isotropic(std::vector<double> mean, double variance, int count);
    static GaussianComponent diagonal(std::vector<double> mean, std::vector<double> variances,
                                      int count);
};

struct GeneratorSpec {
    enum class Kind { kGaussianMixture, kUniformInterval };

    Kind kind = Kind::kGaussianMixture;
    std::vector<GaussianComponent> components;  // gaussian-mixture
    double low = -1.0;                          // uniform-interval bounds
    double high = 1.0;
    int count = 0;                              // uniform-interval point count
    std::uint64_t seed = 0;

    static GeneratorSpec gaussian_mixture(std::vector<GaussianComponent> components,
                                          std::uint64_t seed);
    static GeneratorSpec uniform_interval(double low, double high, int count, std::uint64_t seed);

    // JSON schema is documented in the README ("Generator spec files").
    static GeneratorSpec from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    void validate() const;
};

// Deterministic for a fixed spec (including seed). Gaussian mixtures attach
// the component index as ground truth; uniform-interval sets are 1-D and
// unlabeled.
PointSet generate(const GeneratorSpec& spec);

// CSV ingestion: comma separated, optional single header row, optionally one
// integer label column (0-based index); all other columns must parse as
// finite reals.
PointSet load_csv(const std::string& path, bool has_header = false,
                  std::optional<int> label_column = std::nullopt);

// Writes coordinates (and the ground-truth column when present and
// write_labels is set) with 17 significant digits so a reload is bit-exact.
void save_csv(const PointSet& points, const std::string& path, bool write_labels = true);

// Expected first-iteration density influence of a point at x for a single
// cluster of n points uniform on [-1, 1] with k = 1.
double lemma1_expectation(double x, int n);

// Copy of the selected rows (ground truth included when present), in the
// order given.
PointSet subset(const PointSet& points, const std::vector<int>& ids);

}  // namespace bp
