#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include <bp/cli.hpp>
#include <bp/dataset.hpp>
#include <bp/errors.hpp>
#include <bp/result_io.hpp>

using namespace bp;

namespace {

namespace fs = std::filesystem;

std::string fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / "bp-cli-tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int line_count(const fs::path& path) {
    std::string text = slurp(path);
    int lines = 0;
    for (char c : text)
        if (c == '\n') ++lines;
    return lines;
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

}  // namespace

TEST_CASE("cluster subcommand writes labels, a result file, and plots") {
    auto dir = fresh_dir("cluster-basic");
    int rc = cli_main({"cluster", "--generate", "gaussian2", "--seed", "1", "--out", dir,
                       "--plot"});
    REQUIRE(rc == 0);

    CHECK(line_count(fs::path(dir) / "labels.csv") == 400);
    CHECK_NOTHROW(read_result_json(dir + "/result.json"));

    auto doc = read_json(fs::path(dir) / "result.json");
    CHECK(doc.contains("score"));  // the preset carries ground truth
    CHECK(doc["params"]["k"] == 20);
    CHECK(doc["params"]["seed"] == 1);
    CHECK(doc["input"]["generator"] == "gaussian2");
    CHECK(doc["n_clusters"].get<int>() >= 1);

    CHECK(fs::exists(fs::path(dir) / "clusters.svg"));
    CHECK(fs::exists(fs::path(dir) / "peel-01.svg"));

    // One marker per input point in the final plot.
    std::string svg = slurp(fs::path(dir) / "clusters.svg");
    int circles = 0;
    for (std::size_t pos = svg.find("<circle"); pos != std::string::npos;
         pos = svg.find("<circle", pos + 7))
        ++circles;
    CHECK(circles == 400);
}

TEST_CASE("identical configuration and seed reproduce identical artifacts") {
    auto dir_a = fresh_dir("cluster-repeat-a");
    auto dir_b = fresh_dir("cluster-repeat-b");
    std::vector<std::string> base{"cluster", "--generate", "gaussian2", "--seed", "7"};

    auto args_a = base;
    args_a.insert(args_a.end(), {"--out", dir_a});
    auto args_b = base;
    args_b.insert(args_b.end(), {"--out", dir_b});

    REQUIRE(cli_main(args_a) == 0);
    REQUIRE(cli_main(args_b) == 0);

    CHECK(slurp(fs::path(dir_a) / "result.json") == slurp(fs::path(dir_b) / "result.json"));
    CHECK(slurp(fs::path(dir_a) / "labels.csv") == slurp(fs::path(dir_b) / "labels.csv"));

    // A different seed draws different data, visible in the confidence scores.
    auto dir_c = fresh_dir("cluster-repeat-c");
    REQUIRE(cli_main({"cluster", "--generate", "gaussian2", "--seed", "8", "--out", dir_c}) == 0);
    CHECK(read_json(fs::path(dir_a) / "result.json")["confidence"] !=
          read_json(fs::path(dir_c) / "result.json")["confidence"]);
}

TEST_CASE("generator presets and spec files") {
    SUBCASE("adjacent preset runs") {
        auto dir = fresh_dir("cluster-adjacent");
        CHECK(cli_main({"cluster", "--generate", "gaussian2-adjacent", "--seed", "2", "--out",
                        dir}) == 0);
    }
    SUBCASE("unlabeled preset omits the score block") {
        auto dir = fresh_dir("cluster-uniform");
        REQUIRE(cli_main({"cluster", "--generate", "uniform1d", "--seed", "3", "--k", "5",
                          "--out", dir}) == 0);
        CHECK_FALSE(read_json(fs::path(dir) / "result.json").contains("score"));
    }
    SUBCASE("a spec file drives the generator, and --seed overrides it") {
        auto dir = fresh_dir("cluster-specfile");
        nlohmann::json spec{
            {"kind", "gaussian-mixture"},
            {"components",
             nlohmann::json::array({{{"mean", {-4.0, 0.0}}, {"cov", 1.0}, {"count", 60}},
                                    {{"mean", {4.0, 0.0}}, {"cov", 1.0}, {"count", 60}}})},
            {"seed", 11}};
        auto spec_path = fs::path(dir) / "spec.json";
        std::ofstream(spec_path) << spec.dump();

        auto dir_file_seed = fresh_dir("cluster-specfile-a");
        auto dir_flag_seed = fresh_dir("cluster-specfile-b");
        REQUIRE(cli_main({"cluster", "--generate", spec_path.string(), "--out",
                          dir_file_seed}) == 0);
        REQUIRE(cli_main({"cluster", "--generate", spec_path.string(), "--seed", "12", "--out",
                          dir_flag_seed}) == 0);
        CHECK(read_json(fs::path(dir_file_seed) / "result.json")["confidence"] !=
              read_json(fs::path(dir_flag_seed) / "result.json")["confidence"]);
    }
    SUBCASE("an unknown generator name is a validation failure") {
        CHECK(cli_main({"cluster", "--generate", "mystery-data"}) == 2);
    }
}

TEST_CASE("CSV ingestion flags") {
    auto dir = fresh_dir("cluster-csv");
    PointSet pts = generate(GeneratorSpec::gaussian_mixture(
        {GaussianComponent::isotropic({-4.0, 0.0}, 1.0, 40),
         GaussianComponent::isotropic({4.0, 0.0}, 1.0, 40)},
        6));
    auto csv_path = fs::path(dir) / "points.csv";
    save_csv(pts, csv_path.string());

    SUBCASE("a labeled column feeds the score") {
        auto out = fresh_dir("cluster-csv-labeled");
        REQUIRE(cli_main({"cluster", "--input", csv_path.string(), "--label-column", "2", "--k",
                          "10", "--out", out}) == 0);
        CHECK(read_json(fs::path(out) / "result.json").contains("score"));
    }
    SUBCASE("without the label column the run is unscored") {
        auto out = fresh_dir("cluster-csv-plain");
        PointSet bare(std::vector<double>(pts.coords()), pts.size(), pts.dim());
        save_csv(bare, csv_path.string());
        REQUIRE(cli_main({"cluster", "--input", csv_path.string(), "--k", "10", "--out", out}) ==
                0);
        CHECK_FALSE(read_json(fs::path(out) / "result.json").contains("score"));
    }
    SUBCASE("headers are skipped only on request") {
        auto header_path = fs::path(dir) / "with-header.csv";
        {
            std::ofstream out(header_path);
            out << "x,y\n";
            out << "0,0\n0.1,0\n0.2,0.1\n0.1,0.2\n5,5\n5.1,5\n5.2,5.1\n5.1,4.9\n";
        }
        auto out_dir = fresh_dir("cluster-csv-header");
        CHECK(cli_main({"cluster", "--input", header_path.string(), "--has-header", "--k", "3",
                        "--out", out_dir}) == 0);
        CHECK(cli_main({"cluster", "--input", header_path.string(), "--k", "3", "--out",
                        out_dir}) == 2);
    }
}

TEST_CASE("cluster subcommand exit codes") {
    SUBCASE("neighborhood larger than the dataset is degenerate") {
        CHECK(cli_main({"cluster", "--generate", "uniform1d", "--seed", "1", "--k", "60"}) == 3);
    }
    SUBCASE("missing input file is an I/O failure") {
        CHECK(cli_main({"cluster", "--input", "/no/such/points.csv"}) == 4);
    }
    SUBCASE("input and generator are mutually exclusive and required") {
        CHECK(cli_main({"cluster"}) == 2);
        CHECK(cli_main({"cluster", "--input", "a.csv", "--generate", "gaussian2"}) == 2);
    }
    SUBCASE("unknown flags fail parsing") {
        CHECK(cli_main({"cluster", "--generate", "gaussian2", "--frobnicate"}) == 2);
    }
    SUBCASE("bad parameter values are validation failures") {
        CHECK(cli_main({"cluster", "--generate", "gaussian2", "--peel-fraction", "1.5"}) == 2);
        CHECK(cli_main({"cluster", "--generate", "gaussian2", "--min-cluster-size", "-2"}) == 2);
        CHECK(cli_main({"cluster", "--generate", "gaussian2", "--lambda-offset", "-1e9"}) == 2);
    }
    SUBCASE("a subcommand is required") { CHECK(cli_main({}) == 2); }
    SUBCASE("help exits cleanly") { CHECK(cli_main({"cluster", "--help"}) == 0); }
}

TEST_CASE("validate-lemma subcommand writes the comparison table") {
    auto dir = fresh_dir("lemma");
    REQUIRE(cli_main({"validate-lemma", "--n", "30", "--trials", "50", "--bins", "11", "--seed",
                      "3", "--out", dir, "--plot"}) == 0);
    CHECK(line_count(fs::path(dir) / "lemma.csv") == 12);  // header + one row per bin
    CHECK(slurp(fs::path(dir) / "lemma.csv").rfind("bin_center,empirical,analytic", 0) == 0);
    CHECK(fs::exists(fs::path(dir) / "lemma.svg"));

    CHECK(cli_main({"validate-lemma", "--trials", "0"}) == 2);
}

TEST_CASE("sweep subcommand writes the sensitivity grid") {
    auto dir = fresh_dir("sweep");
    REQUIRE(cli_main({"sweep", "--generate", "gaussian2", "--seed", "5", "--repeats", "1",
                      "--peel-fractions", "0.1", "--lambda-offsets", "-0.2,0,0.2", "--out", dir,
                      "--plot"}) == 0);
    CHECK(line_count(fs::path(dir) / "sweep.csv") == 4);  // header + 3 offsets x 1 fraction
    CHECK(fs::exists(fs::path(dir) / "sweep.svg"));

    SUBCASE("omitted offsets fall back to a three-point default") {
        auto dir2 = fresh_dir("sweep-default");
        REQUIRE(cli_main({"sweep", "--generate", "gaussian2", "--seed", "5", "--repeats", "1",
                          "--peel-fractions", "0.1", "--out", dir2}) == 0);
        CHECK(line_count(fs::path(dir2) / "sweep.csv") == 4);
    }
    SUBCASE("a fixed input file sweeps the same data every repeat") {
        auto data_dir = fresh_dir("sweep-data");
        PointSet pts = generate(GeneratorSpec::gaussian_mixture(
            {GaussianComponent::isotropic({-5.0, 0.0}, 1.0, 50),
             GaussianComponent::isotropic({5.0, 0.0}, 1.0, 50)},
            9));
        auto csv_path = fs::path(data_dir) / "points.csv";
        save_csv(pts, csv_path.string());
        auto out = fresh_dir("sweep-input");
        CHECK(cli_main({"sweep", "--input", csv_path.string(), "--label-column", "2", "--k",
                        "10", "--repeats", "2", "--peel-fractions", "0.1", "--lambda-offsets",
                        "0", "--out", out}) == 0);
    }
    SUBCASE("sweeping unlabeled data cannot be scored") {
        CHECK(cli_main({"sweep", "--generate", "uniform1d", "--seed", "2", "--k", "5",
                        "--repeats", "1"}) == 2);
    }
}

TEST_CASE("rank subcommand reads a result file and validates the label") {
    auto dir = fresh_dir("rank");
    REQUIRE(cli_main({"cluster", "--generate", "gaussian2", "--seed", "4", "--out", dir}) == 0);
    std::string result = dir + "/result.json";

    CHECK(cli_main({"rank", "--result", result, "--cluster", "0", "--m", "3"}) == 0);
    CHECK(cli_main({"rank", "--result", result, "--cluster", "0", "--m", "0"}) == 0);
    CHECK(cli_main({"rank", "--result", result, "--cluster", "99", "--m", "3"}) == 2);
    CHECK(cli_main({"rank", "--result", result, "--cluster", "0", "--m", "-1"}) == 2);
    CHECK(cli_main({"rank", "--result", dir + "/missing.json", "--cluster", "0"}) == 4);
}
