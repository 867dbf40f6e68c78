#include "bp/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "bp/clustering.hpp"
#include "bp/dataset.hpp"
#include "bp/errors.hpp"
#include "bp/experiments.hpp"
#include "bp/metrics.hpp"
#include "bp/result_io.hpp"
#include "bp/svg.hpp"

namespace bp {

namespace {

struct DataOptions {
    std::string input_path;
    std::string generator;
    bool has_header = false;
    int label_column = -1;  // unset
    std::uint64_t seed = 0;
    bool seed_given = false;
};

struct PeelOptions {
    int k = 20;
    double c = 3.0;
    double peel_fraction = 0.10;
    double lambda_offset = 0.0;
    int max_iters = 100;
    double termination_sensitivity = 3.0;
    int min_cluster_size = 0;  // 0 = pick by dataset size
};

void add_data_options(CLI::App* cmd, DataOptions& d) {
    cmd->add_option("--input", d.input_path, "CSV input path");
    cmd->add_option("--generate", d.generator,
                    "generator preset (gaussian2, gaussian2-adjacent, uniform1d) or a spec JSON path");
    cmd->add_flag("--has-header", d.has_header, "skip the first CSV row");
    cmd->add_option("--label-column", d.label_column,
                    "0-based CSV column holding ground-truth labels");
    cmd->add_option("--seed", d.seed, "generator seed")
        ->each([&d](const std::string&) { d.seed_given = true; });
}

void add_peel_options(CLI::App* cmd, PeelOptions& p, bool single_run) {
    cmd->add_option("--k", p.k, "neighborhood size");
    cmd->add_option("--c", p.c, "association threshold strictness");
    if (single_run) {
        cmd->add_option("--peel-fraction", p.peel_fraction,
                        "share of active points peeled per iteration");
        cmd->add_option("--lambda-offset", p.lambda_offset,
                        "additive shift of the estimated lambda");
    }
    cmd->add_option("--max-iters", p.max_iters, "peeling iteration cap");
    cmd->add_option("--min-cluster-size", p.min_cluster_size,
                    "noise filter threshold (0 picks 10 or 30 by dataset size)");
    cmd->add_option("--termination-sensitivity", p.termination_sensitivity,
                    "z-score threshold of the stop rule");
}

bool is_preset(const std::string& name) {
    return name == "gaussian2" || name == "gaussian2-adjacent" || name == "uniform1d";
}

GeneratorSpec generator_spec(const DataOptions& d) {
    const std::string& name = d.generator;
    GeneratorSpec spec;
    if (name == "gaussian2" || name == "gaussian2-adjacent") {
        double offset = name == "gaussian2" ? 5.0 : 2.0;
        spec = GeneratorSpec::gaussian_mixture(
            {GaussianComponent::isotropic({-offset, 0.0}, 1.0, 200),
             GaussianComponent::isotropic({offset, 0.0}, 1.0, 200)},
            d.seed);
    } else if (name == "uniform1d") {
        spec = GeneratorSpec::uniform_interval(-1.0, 1.0, 50, d.seed);
    } else if (std::filesystem::exists(name)) {
        std::ifstream in(name);
        if (!in) throw IoError("cannot read generator spec: " + name);
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::parse_error& e) {
            throw ParseError("invalid generator spec " + name + ": " + e.what());
        }
        spec = GeneratorSpec::from_json(doc);
        if (d.seed_given) spec.seed = d.seed;  // flag beats the file's seed
    } else {
        throw ValidationError("unknown generator '" + name +
                              "' (expected a preset name or a JSON file path)");
    }
    return spec;
}

PointSet load_points(const DataOptions& d) {
    if (d.input_path.empty() == d.generator.empty())
        throw ValidationError("exactly one of --input and --generate is required");
    if (!d.input_path.empty()) {
        std::optional<int> label_col;
        if (d.label_column >= 0) label_col = d.label_column;
        return load_csv(d.input_path, d.has_header, label_col);
    }
    return generate(generator_spec(d));
}

PeelParams to_peel_params(const PeelOptions& p) {
    PeelParams params;
    params.k = p.k;
    params.threshold_strictness = p.c;
    params.peel_fraction = p.peel_fraction;
    params.max_iterations = p.max_iters;
    params.termination_sensitivity = p.termination_sensitivity;
    return params;
}

std::optional<int> min_size_option(const PeelOptions& p) {
    if (p.min_cluster_size == 0) return std::nullopt;
    if (p.min_cluster_size < 0) throw ValidationError("minimum cluster size must be positive");
    return p.min_cluster_size;
}

void ensure_dir(const std::string& path) {
    std::error_code ec;
    std::filesystem::create_directories(path, ec);
    if (ec) throw IoError("cannot create output directory " + path + ": " + ec.message());
}

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << content;
    if (!out) throw IoError("failed writing " + path);
}

void write_cluster_plots(const PointSet& points, const ClusteringResult& result,
                         const std::string& out) {
    if (points.dim() > 2)
        std::fprintf(stderr, "warning: plotting only the first two of %d dimensions\n",
                     points.dim());
    auto bounds = plot_bounds(points);
    write_text(out + "/clusters.svg",
               scatter_svg(points, result.labels.labels(), {}, "final clusters", bounds));

    std::vector<char> active(points.size(), 1);
    for (const auto& rec : result.trace.iterations) {
        if (!rec.applied) break;
        std::vector<int> ids;
        for (int i = 0; i < points.size(); ++i)
            if (active[i]) ids.push_back(i);
        std::vector<int> flat(ids.size(), 0);
        std::vector<char> hot(ids.size(), 0);
        for (std::size_t p = 0, q = 0; p < ids.size() && q < rec.peeled_ids.size(); ++p)
            if (ids[p] == rec.peeled_ids[q]) {
                hot[p] = 1;
                ++q;
            }
        char name[32];
        std::snprintf(name, sizeof name, "/peel-%02d.svg", rec.iteration);
        write_text(out + name,
                   scatter_svg(subset(points, ids), flat, hot,
                               "iteration " + std::to_string(rec.iteration), bounds));
        for (int id : rec.peeled_ids) active[id] = 0;
    }
}

int run_cluster(const DataOptions& data, const PeelOptions& peel, const std::string& out,
                bool plot) {
    PointSet points = load_points(data);
    PeelParams params = to_peel_params(peel);
    params.validate();

    double lambda_hat = estimate_lambda(points, params.k);
    double lambda = lambda_hat + peel.lambda_offset;
    if (!(lambda > 0.0))
        throw ValidationError("lambda offset drives the association threshold non-positive");
    params.lambda = lambda;

    auto min_size = min_size_option(peel);
    const int resolved_min = min_size ? *min_size : default_min_cluster_size(points.size());
    ClusteringResult result = cluster(points, {params, min_size});

    nlohmann::json doc = result_to_json(result);
    doc["params"] = {{"k", params.k},
                     {"c", params.threshold_strictness},
                     {"peel_fraction", params.peel_fraction},
                     {"lambda_offset", peel.lambda_offset},
                     {"lambda_estimate", lambda_hat},
                     {"max_iterations", params.max_iterations},
                     {"termination_sensitivity", params.termination_sensitivity},
                     {"min_cluster_size", resolved_min},
                     {"seed", data.seed}};
    doc["input"] = data.input_path.empty()
                       ? nlohmann::json{{"generator", data.generator}, {"seed", data.seed}}
                       : nlohmann::json{{"path", data.input_path}};
    if (points.has_ground_truth()) {
        auto score = score_run(result, *points.ground_truth());
        doc["score"] = {{"ari", score.ari},
                        {"ami", score.ami},
                        {"n_clusters_found", score.n_clusters_found},
                        {"n_noise", score.n_noise}};
    }

    ensure_dir(out);
    write_labels_csv(result.labels, out + "/labels.csv");
    write_result_json(doc, out + "/result.json");
    if (plot) write_cluster_plots(points, result, out);

    std::printf("n=%d d=%d lambda=%.6g (estimate %.6g, offset %.6g)\n", points.size(),
                points.dim(), lambda, lambda_hat, peel.lambda_offset);
    std::printf("clusters=%d noise=%d cores=%d iterations=%d reason=%s\n", result.n_clusters(),
                result.n_noise(), int(result.core_ids.size()), result.trace.iterations_applied,
                to_string(result.trace.reason));
    if (doc.contains("score"))
        std::printf("ari=%.6f ami=%.6f\n", doc["score"]["ari"].get<double>(),
                    doc["score"]["ami"].get<double>());
    std::printf("wrote %s/labels.csv and %s/result.json\n", out.c_str(), out.c_str());
    return kExitOk;
}

int run_validate_lemma(int n, int trials, int bins, std::uint64_t seed, const std::string& out,
                       bool plot) {
    LemmaReport report = run_lemma_validation(n, trials, bins, seed);

    std::printf("%12s %12s %12s %12s %10s\n", "bin_center", "empirical", "analytic", "abs_error",
                "samples");
    for (const auto& row : report.table)
        std::printf("%12.6f %12.8f %12.8f %12.8f %10lld\n", row.center, row.empirical,
                    row.analytic, row.abs_error, row.samples);
    std::printf("max_abs_error=%.8f\n", report.max_abs_error);

    ensure_dir(out);
    std::string csv = "bin_center,empirical,analytic,abs_error,samples\n";
    char buf[200];
    for (const auto& row : report.table) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%lld\n", row.center,
                      row.empirical, row.analytic, row.abs_error, row.samples);
        csv += buf;
    }
    write_text(out + "/lemma.csv", csv);

    if (plot) {
        LineSeries empirical{"empirical", "#1f77b4", false, {}};
        LineSeries analytic{"analytic", "#d62728", true, {}};
        for (const auto& row : report.table) {
            empirical.points.emplace_back(row.center, row.empirical);
            analytic.points.emplace_back(row.center, row.analytic);
        }
        write_text(out + "/lemma.svg",
                   line_svg({empirical, analytic}, "x", "mean influence",
                            "expected density influence, n=" + std::to_string(n)));
    }
    std::printf("wrote %s/lemma.csv\n", out.c_str());
    return kExitOk;
}

int run_sweep_cmd(const DataOptions& data, const PeelOptions& peel,
                  std::vector<double> offsets, const std::vector<double>& fractions, int repeats,
                  const std::string& out, bool plot) {
    if (data.input_path.empty() == data.generator.empty())
        throw ValidationError("exactly one of --input and --generate is required");

    std::function<PointSet(int)> provider;
    if (!data.input_path.empty()) {
        auto fixed = std::make_shared<PointSet>(load_points(data));
        provider = [fixed](int) { return *fixed; };
    } else {
        GeneratorSpec spec = generator_spec(data);
        provider = [spec](int rep) {
            GeneratorSpec s = spec;
            s.seed += std::uint64_t(rep);  // repeat r draws a fresh dataset
            return generate(s);
        };
    }

    PeelParams base = to_peel_params(peel);
    if (offsets.empty()) {
        // Default shifts are proportional to the data's own lambda scale.
        double lambda_hat = estimate_lambda(provider(0), base.k);
        offsets = {-0.2 * lambda_hat, 0.0, 0.2 * lambda_hat};
    }
    SweepReport report =
        run_sweep(provider, base, min_size_option(peel), offsets, fractions, repeats);

    std::printf("%14s %14s %9s %8s %9s %8s %9s\n", "lambda_offset", "peel_fraction", "mean_ari",
                "std_ari", "mean_ami", "std_ami", "clusters");
    std::string csv = "lambda_offset,peel_fraction,mean_ari,std_ari,mean_ami,std_ami,mean_clusters\n";
    char buf[240];
    for (const auto& cell : report.cells) {
        std::printf("%14.6g %14.6g %9.4f %8.4f %9.4f %8.4f %9.2f\n", cell.lambda_offset,
                    cell.peel_fraction, cell.mean_ari, cell.std_ari, cell.mean_ami, cell.std_ami,
                    cell.mean_clusters);
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n",
                      cell.lambda_offset, cell.peel_fraction, cell.mean_ari, cell.std_ari,
                      cell.mean_ami, cell.std_ami, cell.mean_clusters);
        csv += buf;
    }
    ensure_dir(out);
    write_text(out + "/sweep.csv", csv);

    if (plot) {
        const char* palette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b"};
        std::vector<LineSeries> series;
        for (std::size_t o = 0; o < offsets.size(); ++o) {
            char label[64];
            std::snprintf(label, sizeof label, "ARI offset=%g", offsets[o]);
            LineSeries ari{label, palette[o % 5], false, {}};
            std::snprintf(label, sizeof label, "AMI offset=%g", offsets[o]);
            LineSeries ami{label, palette[o % 5], true, {}};
            for (const auto& cell : report.cells) {
                if (cell.lambda_offset != offsets[o]) continue;
                ari.points.emplace_back(cell.peel_fraction, cell.mean_ari);
                ami.points.emplace_back(cell.peel_fraction, cell.mean_ami);
            }
            series.push_back(std::move(ari));
            series.push_back(std::move(ami));
        }
        write_text(out + "/sweep.svg", line_svg(series, "peel fraction", "score", "parameter sensitivity"));
    }
    std::printf("wrote %s/sweep.csv\n", out.c_str());
    return kExitOk;
}

int run_rank(const std::string& result_path, int cluster_label, int top_m) {
    ClusteringResult result = result_from_json(read_result_json(result_path));
    auto [top, bottom] = confidence_ranking(result, cluster_label, top_m);

    auto join = [](const std::vector<int>& ids) {
        std::string s;
        for (int id : ids) {
            if (!s.empty()) s += ' ';
            s += std::to_string(id);
        }
        return s;
    };
    std::printf("cluster %d top %d by confidence: %s\n", cluster_label, top_m,
                join(top).c_str());
    std::printf("cluster %d bottom %d by confidence: %s\n", cluster_label, top_m,
                join(bottom).c_str());
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"border-peeling clustering"};
    app.require_subcommand(1);

    DataOptions cluster_data;
    PeelOptions cluster_peel;
    std::string cluster_out = "out";
    bool cluster_plot = false;
    CLI::App* cmd_cluster = app.add_subcommand("cluster", "run the full clustering pipeline");
    add_data_options(cmd_cluster, cluster_data);
    add_peel_options(cmd_cluster, cluster_peel, /*single_run=*/true);
    cmd_cluster->add_option("--out", cluster_out, "output directory");
    cmd_cluster->add_flag("--plot", cluster_plot, "write SVG scatter plots");

    int lemma_n = 50, lemma_trials = 10000, lemma_bins = 21;
    std::uint64_t lemma_seed = 0;
    std::string lemma_out = "out";
    bool lemma_plot = false;
    CLI::App* cmd_lemma =
        app.add_subcommand("validate-lemma", "compare sampled density influence with the "
                                             "closed-form expectation (1-D uniform, k=1)");
    cmd_lemma->add_option("--n", lemma_n, "points per trial");
    cmd_lemma->add_option("--trials", lemma_trials, "number of sampled point sets");
    cmd_lemma->add_option("--bins", lemma_bins, "histogram bins over [-1, 1]");
    cmd_lemma->add_option("--seed", lemma_seed, "sampling seed");
    cmd_lemma->add_option("--out", lemma_out, "output directory");
    cmd_lemma->add_flag("--plot", lemma_plot, "write an SVG curve overlay");

    DataOptions sweep_data;
    PeelOptions sweep_peel;
    std::vector<double> sweep_offsets;
    std::vector<double> sweep_fractions{0.06, 0.10, 0.14};
    int sweep_repeats = 5;
    std::string sweep_out = "out";
    bool sweep_plot = false;
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sensitivity grid");
    add_data_options(cmd_sweep, sweep_data);
    add_peel_options(cmd_sweep, sweep_peel, /*single_run=*/false);
    cmd_sweep
        ->add_option("--lambda-offsets", sweep_offsets,
                     "additive lambda shifts (default: -20%, 0, +20% of the estimate)")
        ->delimiter(',');
    cmd_sweep->add_option("--peel-fractions", sweep_fractions, "peel fractions")->delimiter(',');
    cmd_sweep->add_option("--repeats", sweep_repeats, "runs per cell");
    cmd_sweep->add_option("--out", sweep_out, "output directory");
    cmd_sweep->add_flag("--plot", sweep_plot, "write an SVG line plot");

    std::string rank_result = "out/result.json";
    int rank_cluster = 0, rank_m = 10;
    CLI::App* cmd_rank =
        app.add_subcommand("rank", "top/bottom cluster members by confidence");
    cmd_rank->add_option("--result", rank_result, "result JSON path");
    cmd_rank->add_option("--cluster", rank_cluster, "cluster label");
    cmd_rank->add_option("--m", rank_m, "list length");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cmd_cluster->parsed())
            return run_cluster(cluster_data, cluster_peel, cluster_out, cluster_plot);
        if (cmd_lemma->parsed())
            return run_validate_lemma(lemma_n, lemma_trials, lemma_bins, lemma_seed, lemma_out,
                                      lemma_plot);
        if (cmd_sweep->parsed())
            return run_sweep_cmd(sweep_data, sweep_peel, sweep_offsets, sweep_fractions,
                                 sweep_repeats, sweep_out, sweep_plot);
        if (cmd_rank->parsed()) return run_rank(rank_result, rank_cluster, rank_m);
        return kExitValidation;  // unreachable with require_subcommand
    } catch (const DegenerateInputError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitDegenerate;
    } catch (const IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const ValidationError& e) {  // covers ParseError
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitValidation;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

}  // namespace bp
