#include "bp/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "bp/rng.hpp"

namespace bp {

PointSet::PointSet(std::vector<double> coords, int n, int d,
                   std::optional<std::vector<int>> ground_truth)
    : coords_(std::move(coords)), n_(n), d_(d), ground_truth_(std::move(ground_truth)) {
    if (n_ < 1 || d_ < 1) throw ValidationError("point set must have n >= 1 and d >= 1");
    if (coords_.size() != static_cast<std::size_t>(n_) * d_)
        throw ValidationError("coordinate buffer size does not match n x d");
    for (double v : coords_) {
        if (!std::isfinite(v)) throw ValidationError("point set contains a non-finite coordinate");
    }
    if (ground_truth_) {
        if (static_cast<int>(ground_truth_->size()) != n_)
            throw ValidationError("ground-truth label count does not match point count");
        for (int v : *ground_truth_)
            if (v < -1) throw ValidationError("ground-truth label below the noise sentinel");
    }
}

ClusterLabels ClusterLabels::from_contiguous(std::vector<int> labels) {
    int max_label = -1;
    for (int v : labels) {
        if (v < kNoise) throw ValidationError("label below the noise sentinel");
        max_label = std::max(max_label, v);
    }
    int n_clusters = max_label + 1;
    std::vector<char> seen(static_cast<std::size_t>(n_clusters), 0);
    for (int v : labels)
        if (v >= 0) seen[v] = 1;
    for (char s : seen)
        if (!s) throw ValidationError("non-noise labels are not a contiguous 0-based range");
    return ClusterLabels(std::move(labels), n_clusters);
}

ClusterLabels ClusterLabels::compacted(const std::vector<int>& raw) {
    std::map<int, int> remap;
    for (int v : raw) {
        if (v == kNoise) continue;
        if (v < 0) throw ValidationError("negative label other than the -1 noise sentinel");
        remap.emplace(v, 0);
    }
    int next = 0;
    for (auto& [_, compact] : remap) compact = next++;
    std::vector<int> labels(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
        labels[i] = raw[i] == kNoise ? kNoise : remap[raw[i]];
    return ClusterLabels(std::move(labels), next);
}

int ClusterLabels::n_noise() const {
    return static_cast<int>(std::count(labels_.begin(), labels_.end(), kNoise));
}

GaussianComponent GaussianComponent::isotropic(std::vector<double> mean, double variance,
                                               int count) {
    GaussianComponent c;
    std::size_t d = mean.size();
    c.mean = std::move(mean);
    c.covariance.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t j = 0; j < d; ++j) c.covariance[j][j] = variance;
    c.count = count;
    return c;
}

GaussianComponent GaussianComponent::diagonal(std::vector<double> mean,
                                              std::vector<double> variances, int count) {
    if (mean.size() != variances.size())
        throw ValidationError("diagonal covariance length does not match mean dimension");
    GaussianComponent c;
    std::size_t d = mean.size();
    c.mean = std::move(mean);
    c.covariance.assign(d, std::vector<double>(d, 0.0));
    for (std::size_t j = 0; j < d; ++j) c.covariance[j][j] = variances[j];
    c.count = count;
    return c;
}

GeneratorSpec GeneratorSpec::gaussian_mixture(std::vector<GaussianComponent> components,
                                              std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = Kind::kGaussianMixture;
    spec.components = std::move(components);
    spec.seed = seed;
    spec.validate();
    return spec;
}

GeneratorSpec GeneratorSpec::uniform_interval(double low, double high, int count,
                                              std::uint64_t seed) {
    GeneratorSpec spec;
    spec.kind = Kind::kUniformInterval;
    spec.low = low;
    spec.high = high;
    spec.count = count;
    spec.seed = seed;
    spec.validate();
    return spec;
}

namespace {

// Lower-triangular Cholesky factor; fails iff the matrix is not symmetric
// positive-definite.
std::vector<std::vector<double>> cholesky(const std::vector<std::vector<double>>& m) {
    std::size_t d = m.size();
    for (std::size_t i = 0; i < d; ++i) {
        if (m[i].size() != d) throw ValidationError("covariance matrix is not square");
        for (std::size_t j = 0; j < d; ++j) {
            if (std::abs(m[i][j] - m[j][i]) > 1e-12 * (1.0 + std::abs(m[i][j])))
                throw ValidationError("covariance matrix is not symmetric");
        }
    }
    std::vector<std::vector<double>> l(d, std::vector<double>(d, 0.0));
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double sum = m[i][j];
            for (std::size_t r = 0; r < j; ++r) sum -= l[i][r] * l[j][r];
            if (i == j) {
                if (sum <= 0.0)
                    throw ValidationError("covariance matrix is not positive-definite");
                l[i][i] = std::sqrt(sum);
            } else {
                l[i][j] = sum / l[j][j];
            }
        }
    }
    return l;
}

nlohmann::json covariance_to_json(const std::vector<std::vector<double>>& cov) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : cov) rows.push_back(row);
    return rows;
}

std::vector<std::vector<double>> covariance_from_json(const nlohmann::json& j, std::size_t d) {
    if (j.is_number()) {
        double v = j.get<double>();
        std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < d; ++i) cov[i][i] = v;
        return cov;
    }
    if (j.is_array() && !j.empty() && j[0].is_number()) {
        auto diag = j.get<std::vector<double>>();
        if (diag.size() != d)
            throw ValidationError("diagonal covariance length does not match mean dimension");
        std::vector<std::vector<double>> cov(d, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < d; ++i) cov[i][i] = diag[i];
        return cov;
    }
    if (j.is_array()) {
        auto cov = j.get<std::vector<std::vector<double>>>();
        if (cov.size() != d)
            throw ValidationError("covariance matrix size does not match mean dimension");
        return cov;
    }
    throw ValidationError("covariance must be a number, an array, or a matrix");
}

}  // namespace

void GeneratorSpec::validate() const {
    if (kind == Kind::kGaussianMixture) {
        if (components.empty()) throw ValidationError("gaussian mixture needs >= 1 component");
        std::size_t d = components.front().mean.size();
        if (d == 0) throw ValidationError("component mean must have dimension >= 1");
        for (const auto& c : components) {
            if (c.mean.size() != d)
                throw ValidationError("all mixture components must share one dimension");
            if (c.count < 1) throw ValidationError("component count must be >= 1");
            cholesky(c.covariance);
        }
    } else {
        if (!(low < high)) throw ValidationError("uniform interval needs low < high");
        if (count < 1) throw ValidationError("uniform interval needs count >= 1");
    }
}

GeneratorSpec GeneratorSpec::from_json(const nlohmann::json& j) {
    GeneratorSpec spec;
    std::string kind = j.at("kind").get<std::string>();
    spec.seed = j.value("seed", std::uint64_t{0});
    if (kind == "gaussian-mixture") {
        spec.kind = Kind::kGaussianMixture;
        for (const auto& cj : j.at("components")) {
            GaussianComponent c;
            c.mean = cj.at("mean").get<std::vector<double>>();
            c.covariance = covariance_from_json(cj.value("cov", nlohmann::json(1.0)), c.mean.size());
            c.count = cj.at("count").get<int>();
            spec.components.push_back(std::move(c));
        }
    } else if (kind == "uniform-interval") {
        spec.kind = Kind::kUniformInterval;
        spec.low = j.at("low").get<double>();
        spec.high = j.at("high").get<double>();
        spec.count = j.at("count").get<int>();
    } else {
        throw ValidationError("unknown generator kind: " + kind);
    }
    spec.validate();
    return spec;
}

nlohmann::json GeneratorSpec::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    if (kind == Kind::kGaussianMixture) {
        j["kind"] = "gaussian-mixture";
        nlohmann::json comps = nlohmann::json::array();
        for (const auto& c : components) {
            comps.push_back({{"mean", c.mean},
                             {"cov", covariance_to_json(c.covariance)},
                             {"count", c.count}});
        }
        j["components"] = comps;
    } else {
        j["kind"] = "uniform-interval";
        j["low"] = low;
        j["high"] = high;
        j["count"] = count;
    }
    return j;
}

PointSet generate(const GeneratorSpec& spec) {
    spec.validate();
    std::mt19937_64 gen(spec.seed);
    if (spec.kind == GeneratorSpec::Kind::kUniformInterval) {
        std::vector<double> coords(static_cast<std::size_t>(spec.count));
        for (double& v : coords) v = uniform_in(gen, spec.low, spec.high);
        return PointSet(std::move(coords), spec.count, 1);
    }

    int d = static_cast<int>(spec.components.front().mean.size());
    int n = 0;
    for (const auto& c : spec.components) n += c.count;
    std::vector<double> coords;
    coords.reserve(static_cast<std::size_t>(n) * d);
    std::vector<int> labels;
    labels.reserve(n);

    std::vector<double> z(d);
    for (std::size_t ci = 0; ci < spec.components.size(); ++ci) {
        const auto& comp = spec.components[ci];
        auto l = cholesky(comp.covariance);
        for (int p = 0; p < comp.count; ++p) {
            for (int j = 0; j < d; ++j) z[j] = standard_normal(gen);
            for (int j = 0; j < d; ++j) {
                double v = comp.mean[j];
                for (int r = 0; r <= j; ++r) v += l[j][r] * z[r];
                coords.push_back(v);
            }
            labels.push_back(static_cast<int>(ci));
        }
    }
    return PointSet(std::move(coords), n, d, std::move(labels));
}

namespace {

double parse_real(const std::string& token, int line_no) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("CSV parse error at line " + std::to_string(line_no) +
                         ": bad numeric field '" + token + "'");
    return value;
}

int parse_label(const std::string& token, int line_no) {
    const char* begin = token.data();
    const char* end = begin + token.size();
    int value = 0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw ParseError("CSV parse error at line " + std::to_string(line_no) +
                         ": bad label field '" + token + "'");
    return value;
}

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) {
        // Trim spaces and stray carriage returns.
        std::size_t b = field.find_first_not_of(" \t\r");
        std::size_t e = field.find_last_not_of(" \t\r");
        fields.push_back(b == std::string::npos ? "" : field.substr(b, e - b + 1));
    }
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

}  // namespace

PointSet load_csv(const std::string& path, bool has_header, std::optional<int> label_column) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open CSV file: " + path);

    std::vector<double> coords;
    std::vector<int> labels;
    int n = 0;
    int width = -1;
    int line_no = 0;
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && has_header) continue;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_row(line);
        if (width == -1) {
            width = static_cast<int>(fields.size());
            if (label_column && (*label_column < 0 || *label_column >= width))
                throw ValidationError("label column index out of range");
        } else if (static_cast<int>(fields.size()) != width) {
            throw ParseError("CSV parse error at line " + std::to_string(line_no) +
                             ": expected " + std::to_string(width) + " fields, got " +
                             std::to_string(fields.size()));
        }
        for (int j = 0; j < width; ++j) {
            if (label_column && j == *label_column) {
                labels.push_back(parse_label(fields[j], line_no));
            } else {
                double v = parse_real(fields[j], line_no);
                if (!std::isfinite(v))
                    throw ParseError("CSV parse error at line " + std::to_string(line_no) +
                                     ": non-finite coordinate");
                coords.push_back(v);
            }
        }
        ++n;
    }
    if (n == 0) throw ParseError("empty CSV input: " + path);
    int d = width - (label_column ? 1 : 0);
    if (d < 1) throw ValidationError("CSV has no coordinate columns");
    std::optional<std::vector<int>> gt;
    if (label_column) gt = std::move(labels);
    return PointSet(std::move(coords), n, d, std::move(gt));
}

void save_csv(const PointSet& points, const std::string& path, bool write_labels) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write CSV file: " + path);
    char buf[40];
    bool with_labels = write_labels && points.has_ground_truth();
    for (int i = 0; i < points.size(); ++i) {
        for (int j = 0; j < points.dim(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", points.coord(i, j));
            if (j > 0) out << ',';
            out << buf;
        }
        if (with_labels) out << ',' << (*points.ground_truth())[i];
        out << '\n';
    }
    if (!out) throw IoError("failed writing CSV file: " + path);
}

double lemma1_expectation(double x, int n) {
    if (x < -1.0 || x > 1.0) throw ValidationError("lemma1_expectation requires x in [-1, 1]");
    if (n < 2) throw ValidationError("lemma1_expectation requires n >= 2");
    double nn = static_cast<double>(n);
    double left = (nn * (x + 1.0) - 2.0) / (2.0 * nn) * std::exp(-nn * (x + 1.0) / 2.0);
    double right = (nn * (1.0 - x) - 2.0) / (2.0 * nn) * std::exp(-nn * (1.0 - x) / 2.0);
    return (2.0 / nn + left + right) * std::exp(-1.0);
}

PointSet subset(const PointSet& points, const std::vector<int>& ids) {
    std::vector<double> coords;
    coords.reserve(ids.size() * std::size_t(points.dim()));
    std::optional<std::vector<int>> gt;
    if (points.has_ground_truth()) gt.emplace();
    for (int id : ids) {
        if (id < 0 || id >= points.size())
            throw ValidationError("subset id " + std::to_string(id) + " is out of range");
        auto row = points.point(id);
        coords.insert(coords.end(), row.begin(), row.end());
        if (gt) gt->push_back((*points.ground_truth())[id]);
    }
    return PointSet(std::move(coords), int(ids.size()), points.dim(), std::move(gt));
}

}  // namespace bp
