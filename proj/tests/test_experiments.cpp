#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <vector>

#include <bp/dataset.hpp>
#include <bp/experiments.hpp>
#include <bp/rng.hpp>

using namespace bp;

namespace {

PointSet sweep_blobs(int rep) {
    return generate(GeneratorSpec::gaussian_mixture(
        {GaussianComponent::isotropic({-5.0, 0.0}, 1.0, 60),
         GaussianComponent::isotropic({5.0, 0.0}, 1.0, 60)},
        1000 + std::uint64_t(rep)));
}

}  // namespace

TEST_CASE("lemma validation reports a full, deterministic table") {
    auto report = run_lemma_validation(50, 200, 21, 99);

    CHECK(report.n == 50);
    CHECK(report.trials == 200);
    CHECK(report.seed == 99);
    REQUIRE(int(report.table.size()) == 21);

    const double width = 2.0 / 21.0;
    long long samples = 0;
    for (int i = 0; i < 21; ++i) {
        const auto& row = report.table[i];
        CHECK(row.center == doctest::Approx(-1.0 + (i + 0.5) * width).epsilon(1e-12));
        CHECK(row.samples >= 0);
        samples += row.samples;
        if (row.samples > 0) {
            CHECK(row.empirical > 0.0);
            CHECK(row.empirical < 0.1);
            CHECK(row.abs_error == doctest::Approx(std::abs(row.empirical - row.analytic)));
        }
    }
    CHECK(samples == 50LL * 200);

    double worst = 0.0;
    for (const auto& row : report.table)
        if (row.samples > 0) worst = std::max(worst, row.abs_error);
    CHECK(report.max_abs_error == worst);
    CHECK(report.max_abs_error < 0.01);

    auto again = run_lemma_validation(50, 200, 21, 99);
    for (int i = 0; i < 21; ++i) {
        CHECK(again.table[i].empirical == report.table[i].empirical);
        CHECK(again.table[i].samples == report.table[i].samples);
    }
}

TEST_CASE("lemma analytic column matches frozen bin averages") {
    // Bin-averaged closed-form expectation for n = 50 over 21 bins of
    // [-1, 1], evaluated independently with extended-precision quadrature.
    auto report = run_lemma_validation(50, 1, 21, 5);
    CHECK(report.table[0].analytic == doctest::Approx(0.01403487677).epsilon(1e-7));
    CHECK(report.table[10].analytic == doctest::Approx(0.01471517765).epsilon(1e-7));
    CHECK(report.table[19].analytic == doctest::Approx(0.01526967392).epsilon(1e-7));

    // The expectation is symmetric and dips at the interval's edges, so the
    // two boundary bins carry the smallest analytic values.
    CHECK(report.table[0].analytic == doctest::Approx(report.table[20].analytic).epsilon(1e-10));
    for (int i = 1; i < 20; ++i) {
        CHECK(report.table[0].analytic < report.table[i].analytic);
        CHECK(report.table[20].analytic < report.table[i].analytic);
    }
}

TEST_CASE("lemma validation is invariant to the worker count") {
    setenv("BP_THREADS", "1", 1);
    auto serial = run_lemma_validation(30, 40, 11, 7);
    setenv("BP_THREADS", "4", 1);
    auto parallel = run_lemma_validation(30, 40, 11, 7);
    unsetenv("BP_THREADS");

    for (int i = 0; i < 11; ++i) {
        CHECK(serial.table[i].empirical == parallel.table[i].empirical);
        CHECK(serial.table[i].samples == parallel.table[i].samples);
    }
    CHECK(serial.max_abs_error == parallel.max_abs_error);
}

TEST_CASE("lemma validation rejects degenerate arguments") {
    CHECK_THROWS_AS(run_lemma_validation(1, 10, 5, 0), ValidationError);
    CHECK_THROWS_AS(run_lemma_validation(10, 0, 5, 0), ValidationError);
    CHECK_THROWS_AS(run_lemma_validation(10, 10, 0, 0), ValidationError);
}

TEST_CASE("sweeps cover the offset-by-fraction grid in order") {
    std::vector<double> offsets{-0.3, 0.0, 0.3};
    std::vector<double> fractions{0.08, 0.10};
    auto report = run_sweep(sweep_blobs, {}, std::nullopt, offsets, fractions, 2);

    CHECK(report.repeats == 2);
    REQUIRE(report.cells.size() == 6);
    int idx = 0;
    for (double off : offsets) {
        for (double frac : fractions) {
            const auto& cell = report.cells[idx++];
            CHECK(cell.lambda_offset == off);
            CHECK(cell.peel_fraction == frac);
            CHECK(std::isfinite(cell.mean_ari));
            CHECK(cell.mean_ari > 0.5);  // well-separated blobs stay easy
            CHECK(cell.mean_ari <= 1.0);
            CHECK(cell.std_ari >= 0.0);
            CHECK(cell.mean_ami <= 1.0 + 1e-9);
            CHECK(cell.mean_clusters >= 1.0);
        }
    }
}

TEST_CASE("sweeps are deterministic and thread-invariant") {
    std::vector<double> offsets{0.0, 0.2};
    std::vector<double> fractions{0.10};

    setenv("BP_THREADS", "1", 1);
    auto serial = run_sweep(sweep_blobs, {}, std::nullopt, offsets, fractions, 2);
    setenv("BP_THREADS", "4", 1);
    auto parallel = run_sweep(sweep_blobs, {}, std::nullopt, offsets, fractions, 2);
    unsetenv("BP_THREADS");

    auto repeat = run_sweep(sweep_blobs, {}, std::nullopt, offsets, fractions, 2);
    REQUIRE(serial.cells.size() == parallel.cells.size());
    for (std::size_t i = 0; i < serial.cells.size(); ++i) {
        CHECK(serial.cells[i].mean_ari == parallel.cells[i].mean_ari);
        CHECK(serial.cells[i].std_ari == parallel.cells[i].std_ari);
        CHECK(serial.cells[i].mean_ami == repeat.cells[i].mean_ami);
        CHECK(serial.cells[i].mean_clusters == repeat.cells[i].mean_clusters);
    }
}

TEST_CASE("sweep validation failures") {
    auto unlabeled = [](int) {
        return generate(GeneratorSpec::uniform_interval(-1.0, 1.0, 40, 3));
    };
    CHECK_THROWS_AS(run_sweep(unlabeled, {}, std::nullopt, {0.0}, {0.1}, 1), ValidationError);
    CHECK_THROWS_AS(run_sweep(sweep_blobs, {}, std::nullopt, {}, {0.1}, 1), ValidationError);
    CHECK_THROWS_AS(run_sweep(sweep_blobs, {}, std::nullopt, {0.0}, {}, 1), ValidationError);
    CHECK_THROWS_AS(run_sweep(sweep_blobs, {}, std::nullopt, {0.0}, {0.1}, 0), ValidationError);
    // An offset that drags lambda negative is caught before clustering.
    CHECK_THROWS_AS(run_sweep(sweep_blobs, {}, std::nullopt, {-1e6}, {0.1}, 1), ValidationError);
}
