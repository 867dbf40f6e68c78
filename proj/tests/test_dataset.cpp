#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <bp/dataset.hpp>
#include <bp/errors.hpp>
#include <bp/pointset.hpp>

using namespace bp;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

}  // namespace

TEST_CASE("point set exposes rows, coords, and optional ground truth") {
    PointSet pts({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, 3, 2, std::vector<int>{0, 0, 1});
    CHECK(pts.size() == 3);
    CHECK(pts.dim() == 2);
    CHECK(pts.coord(1, 0) == 3.0);
    CHECK(pts.point(2)[1] == 6.0);
    REQUIRE(pts.has_ground_truth());
    CHECK((*pts.ground_truth())[2] == 1);
    CHECK(squared_distance(pts, 0, 1) == 8.0);
}

TEST_CASE("point set validation") {
    CHECK_THROWS_AS(PointSet({1.0, 2.0, 3.0}, 2, 2), ValidationError);
    CHECK_THROWS_AS(PointSet({1.0, std::nan("")}, 1, 2), ValidationError);
    CHECK_THROWS_AS(PointSet({1.0, 2.0}, 1, 2, std::vector<int>{0, 1}), ValidationError);
    CHECK_THROWS_AS(PointSet({1.0, 2.0}, 1, 2, std::vector<int>{-2}), ValidationError);
}

TEST_CASE("cluster labels enforce the contiguous range invariant") {
    auto labels = ClusterLabels::from_contiguous({0, 1, -1, 0});
    CHECK(labels.n_clusters() == 2);
    CHECK(labels.n_noise() == 1);
    CHECK(labels[2] == ClusterLabels::kNoise);
    CHECK_THROWS_AS(ClusterLabels::from_contiguous({0, 2}), ValidationError);
    CHECK_THROWS_AS(ClusterLabels::from_contiguous({1}), ValidationError);

    auto compacted = ClusterLabels::compacted({7, -1, 3, 7});
    CHECK(compacted.n_clusters() == 2);
    CHECK(compacted[0] == 1);  // ascending original value: 3 -> 0, 7 -> 1
    CHECK(compacted[1] == ClusterLabels::kNoise);
    CHECK(compacted[2] == 0);
}

TEST_CASE("gaussian mixture generation is deterministic and labeled") {
    auto spec = GeneratorSpec::gaussian_mixture(
        {GaussianComponent::isotropic({-5.0, 0.0}, 1.0, 200),
         GaussianComponent::isotropic({5.0, 0.0}, 1.0, 200)},
        7);
    PointSet a = generate(spec);
    PointSet b = generate(spec);
    CHECK(a.size() == 400);
    CHECK(a.dim() == 2);
    CHECK(a.coords() == b.coords());
    REQUIRE(a.has_ground_truth());
    CHECK((*a.ground_truth())[0] == 0);
    CHECK((*a.ground_truth())[399] == 1);

    // Component means should land near the configured centers.
    double mx = 0.0;
    for (int i = 0; i < 200; ++i) mx += a.coord(i, 0);
    CHECK(std::fabs(mx / 200 + 5.0) < 0.5);

    auto other = spec;
    other.seed = 8;
    CHECK(generate(other).coords() != a.coords());
}

TEST_CASE("diagonal covariance scales each axis") {
    auto spec = GeneratorSpec::gaussian_mixture(
        {GaussianComponent::diagonal({0.0, 0.0}, {9.0, 0.01}, 4000)}, 3);
    PointSet pts = generate(spec);
    double sx = 0.0, sy = 0.0;
    for (int i = 0; i < pts.size(); ++i) {
        sx += pts.coord(i, 0) * pts.coord(i, 0);
        sy += pts.coord(i, 1) * pts.coord(i, 1);
    }
    CHECK(sx / pts.size() == doctest::Approx(9.0).epsilon(0.1));
    CHECK(sy / pts.size() == doctest::Approx(0.01).epsilon(0.1));
}

TEST_CASE("uniform interval generation covers the range") {
    auto spec = GeneratorSpec::uniform_interval(-1.0, 1.0, 50, 11);
    PointSet pts = generate(spec);
    CHECK(pts.size() == 50);
    CHECK(pts.dim() == 1);
    CHECK_FALSE(pts.has_ground_truth());
    for (int i = 0; i < 50; ++i) {
        CHECK(pts.coord(i, 0) >= -1.0);
        CHECK(pts.coord(i, 0) < 1.0);
    }
}

TEST_CASE("generator spec validation") {
    CHECK_THROWS_AS(generate(GeneratorSpec::uniform_interval(1.0, -1.0, 10, 0)),
                    ValidationError);
    CHECK_THROWS_AS(generate(GeneratorSpec::uniform_interval(-1.0, 1.0, 0, 0)),
                    ValidationError);
    CHECK_THROWS_AS(generate(GeneratorSpec::gaussian_mixture({}, 0)), ValidationError);
    CHECK_THROWS_AS(
        generate(GeneratorSpec::gaussian_mixture(
            {GaussianComponent::isotropic({0.0}, -1.0, 10)}, 0)),
        ValidationError);
    // Mismatched dimensions across components.
    CHECK_THROWS_AS(
        generate(GeneratorSpec::gaussian_mixture(
            {GaussianComponent::isotropic({0.0}, 1.0, 10),
             GaussianComponent::isotropic({0.0, 0.0}, 1.0, 10)}, 0)),
        ValidationError);
}

TEST_CASE("generator spec json round trip") {
    auto spec = GeneratorSpec::gaussian_mixture(
        {GaussianComponent::isotropic({-2.0, 0.0}, 1.0, 30),
         GaussianComponent::diagonal({2.0, 1.0}, {0.5, 2.0}, 40)},
        21);
    auto doc = spec.to_json();
    auto back = GeneratorSpec::from_json(doc);
    CHECK(back.to_json() == doc);
    CHECK(generate(back).coords() == generate(spec).coords());

    auto uspec = GeneratorSpec::uniform_interval(-1.0, 1.0, 50, 5);
    CHECK(GeneratorSpec::from_json(uspec.to_json()).to_json() == uspec.to_json());

    CHECK_THROWS_AS(GeneratorSpec::from_json(nlohmann::json{{"kind", "nope"}}),
                    ValidationError);
}

TEST_CASE("csv round trip is bit exact") {
    auto spec = GeneratorSpec::gaussian_mixture(
        {GaussianComponent::isotropic({-5.0, 0.0}, 1.0, 40),
         GaussianComponent::isotropic({5.0, 0.0}, 1.0, 40)},
        13);
    PointSet pts = generate(spec);
    std::string path = temp_path("bp_test_roundtrip.csv");
    save_csv(pts, path);
    PointSet back = load_csv(path, false, pts.dim());  // label column after coords
    CHECK(back.coords() == pts.coords());
    REQUIRE(back.has_ground_truth());
    CHECK(*back.ground_truth() == *pts.ground_truth());
    std::filesystem::remove(path);
}

TEST_CASE("csv ingestion handles headers and label columns") {
    std::string path = temp_path("bp_test_header.csv");
    {
        std::ofstream out(path);
        out << "x,y,label\n";
        out << "0.5,1.5,0\n";
        out << "2.5,3.5,1\n";
        out << "4.5,5.5,-1\n";
    }
    PointSet pts = load_csv(path, true, 2);
    CHECK(pts.size() == 3);
    CHECK(pts.dim() == 2);
    CHECK(pts.coord(1, 1) == 3.5);
    REQUIRE(pts.has_ground_truth());
    CHECK((*pts.ground_truth())[2] == -1);

    PointSet unlabeled = load_csv(path, true);
    CHECK(unlabeled.dim() == 3);
    CHECK_FALSE(unlabeled.has_ground_truth());
    std::filesystem::remove(path);
}

TEST_CASE("csv ingestion rejects malformed input") {
    std::string path = temp_path("bp_test_bad.csv");

    auto write = [&](const std::string& body) {
        std::ofstream out(path);
        out << body;
    };

    write("1.0,2.0\n3.0\n");
    CHECK_THROWS_AS(load_csv(path), ParseError);  // ragged row

    write("1.0,abc\n");
    CHECK_THROWS_AS(load_csv(path), ParseError);  // non-numeric coordinate

    write("1.0,nan\n");
    CHECK_THROWS_AS(load_csv(path), ParseError);  // non-finite coordinate

    write("1.0,2.5\n");
    CHECK_THROWS_AS(load_csv(path, false, 1), ParseError);  // non-integer label

    write("");
    CHECK_THROWS_AS(load_csv(path), ParseError);  // empty file

    CHECK_THROWS_AS(load_csv(temp_path("bp_does_not_exist.csv")), IoError);
    std::filesystem::remove(path);
}

TEST_CASE("lemma expectation matches the closed form") {
    // Frozen reference values, cross-checked against a 30-digit evaluation
    // of the closed-form expression.
    CHECK(lemma1_expectation(0.0, 50) ==
          doctest::Approx(0.014715177651762418).epsilon(1e-12));
    CHECK(lemma1_expectation(1.0, 50) ==
          doctest::Approx(0.0073575888234288464).epsilon(1e-12));
    CHECK(lemma1_expectation(-1.0, 50) ==
          doctest::Approx(0.0073575888234288464).epsilon(1e-12));
    CHECK(lemma1_expectation(0.5, 50) ==
          doctest::Approx(0.014715492967447575).epsilon(1e-12));
    CHECK(lemma1_expectation(0.25, 10) ==
          doctest::Approx(0.076327945969288977).epsilon(1e-12));
    CHECK(lemma1_expectation(0.9, 50) ==
          doctest::Approx(0.015621099149527248).epsilon(1e-12));
    CHECK(lemma1_expectation(0.0, 2) ==
          doctest::Approx(0.36787944117144232).epsilon(1e-12));

    // Symmetry and endpoint minimality.
    for (double x : {0.1, 0.35, 0.8}) {
        CHECK(lemma1_expectation(x, 50) ==
              doctest::Approx(lemma1_expectation(-x, 50)).epsilon(1e-12));
        CHECK(lemma1_expectation(1.0, 50) < lemma1_expectation(x, 50));
    }

    CHECK_THROWS_AS(lemma1_expectation(1.5, 50), ValidationError);
    CHECK_THROWS_AS(lemma1_expectation(0.0, 1), ValidationError);
}

TEST_CASE("subset copies rows and truth in the given order") {
    PointSet pts({0.0, 1.0, 2.0, 3.0, 4.0, 5.0}, 3, 2, std::vector<int>{5, 6, 7});
    PointSet sub = subset(pts, {2, 0});
    CHECK(sub.size() == 2);
    CHECK(sub.coord(0, 0) == 4.0);
    CHECK(sub.coord(1, 1) == 1.0);
    CHECK((*sub.ground_truth())[0] == 7);
    CHECK_THROWS_AS(subset(pts, {3}), ValidationError);
}
