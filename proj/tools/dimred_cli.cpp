#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dimred/dataset.hpp"
#include "dimred/embed.hpp"
#include "dimred/error.hpp"
#include "dimred/pipeline.hpp"
#include "dimred/svg.hpp"

namespace {

// 0 success, 1 partial benchmark failure, 2 invalid input, 3 internal failure.
int exit_code_for(dimred::ErrorCode code) {
    switch (code) {
        case dimred::ErrorCode::svd_failure:
        case dimred::ErrorCode::eigen_failure:
        case dimred::ErrorCode::fit_diverged:
        case dimred::ErrorCode::io_error:
            return 3;
        default:
            return 2;
    }
}

struct RunFlags {
    std::string config_path;
    std::string data_path;
    std::string label_column;
    std::string kind = "blobs";
    int n_points = 2000;
    int n_blobs = 12;
    int data_dim = 50;
    double blob_std = 1.0;
    double box_scale = 10.0;
    double radius = 1.0;
    double noise_std = 0.1;
    bool standardize = false;
    std::uint64_t seed = 0;
    std::string out = ".";
    std::string name = "run";
    int n_neighbors = 15;
    int dimension = 2;
    std::string init = "random";
    double min_dist = 0.1;
    double spread = 1.0;
    int n_iters = 128;
    double learning_rate = 1.0;
    int neg_samples = 5;
    int subsample = 512;
    int betti_grid = 200;
    double test_fraction = 0.3;
    int context_k = 10;
    int threads = 0;
    bool exact_repulsion = false;
    std::vector<std::string> metrics;
};

void add_dataset_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--data", f.data_path, "Input CSV dataset (overrides --kind)");
    cmd->add_option("--label-column", f.label_column, "Label column name or index in --data");
    cmd->add_option("--kind", f.kind, "Synthetic dataset kind")
        ->check(CLI::IsMember({"blobs", "disk", "moons"}));
    cmd->add_option("--n-points", f.n_points, "Number of points to generate");
    cmd->add_option("--n-blobs", f.n_blobs, "Number of blob centers (blobs)");
    cmd->add_option("--data-dim", f.data_dim, "Ambient dimension (blobs)");
    cmd->add_option("--blob-std", f.blob_std, "Per-blob Gaussian std (blobs)");
    cmd->add_option("--box-scale", f.box_scale, "Center sampling box half-width (blobs)");
    cmd->add_option("--radius", f.radius, "Disk radius (disk)");
    cmd->add_option("--noise-std", f.noise_std, "Coordinate noise std (moons)");
    cmd->add_flag("--standardize", f.standardize, "Standardize columns before embedding");
}

void add_run_flags(CLI::App* cmd, RunFlags& f) {
    cmd->add_option("--config", f.config_path, "Pipeline config JSON file");
    add_dataset_flags(cmd, f);
    cmd->add_option("--seed", f.seed, "Run seed");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--name", f.name, "Run name echoed into metrics.json");
    cmd->add_option("--n-neighbors", f.n_neighbors, "kNN graph size");
    cmd->add_option("--dimension", f.dimension, "Embedding dimension");
    cmd->add_option("--init", f.init, "Initializer")
        ->check(CLI::IsMember({"random", "pca", "spectral"}));
    cmd->add_option("--min-dist", f.min_dist, "Kernel plateau radius");
    cmd->add_option("--spread", f.spread, "Kernel decay length");
    cmd->add_option("--n-iters", f.n_iters, "Layout iterations");
    cmd->add_option("--learning-rate", f.learning_rate, "Initial layout learning rate");
    cmd->add_option("--neg-samples", f.neg_samples, "Repulsion samples per point");
    cmd->add_option("--subsample", f.subsample, "Subsample size for global metrics");
    cmd->add_option("--betti-grid", f.betti_grid, "Betti curve grid resolution");
    cmd->add_option("--test-fraction", f.test_fraction, "Held-out fraction for context metrics");
    cmd->add_option("--context-k", f.context_k, "k for the context kNN classifier");
    cmd->add_option("--threads", f.threads, "Worker threads (0 = hardware)");
    cmd->add_flag("--exact-repulsion", f.exact_repulsion, "All-pairs repulsion");
}

dimred::PipelineConfig build_config(const CLI::App* cmd, const RunFlags& f) {
    dimred::PipelineConfig cfg;
    if (!f.config_path.empty()) cfg = dimred::load_config(f.config_path);
    const auto passed = [&](const std::string& flag) { return cmd->count(flag) > 0; };

    if (passed("--data")) {
        cfg.dataset = dimred::DatasetSpec{};
        cfg.dataset.kind = "csv";
        cfg.dataset.path = f.data_path;
    } else if (passed("--kind")) {
        cfg.dataset.kind = f.kind;
    }
    if (passed("--label-column")) cfg.dataset.label_column = f.label_column;
    if (passed("--n-points")) cfg.dataset.n_points = f.n_points;
    if (passed("--n-blobs")) cfg.dataset.n_blobs = f.n_blobs;
    if (passed("--data-dim")) cfg.dataset.dim = f.data_dim;
    if (passed("--blob-std")) cfg.dataset.blob_std = f.blob_std;
    if (passed("--box-scale")) cfg.dataset.box_scale = f.box_scale;
    if (passed("--radius")) cfg.dataset.radius = f.radius;
    if (passed("--noise-std")) cfg.dataset.noise_std = f.noise_std;
    if (passed("--standardize")) cfg.dataset.standardize = f.standardize;

    if (passed("--seed")) cfg.seed = dimred::Seed{f.seed};
    if (passed("--out")) cfg.output_dir = f.out;
    if (passed("--name")) cfg.name = f.name;
    if (passed("--n-neighbors")) cfg.n_neighbors = f.n_neighbors;
    if (passed("--dimension")) cfg.dimension = f.dimension;
    if (passed("--init")) {
        if (f.init == "pca")
            cfg.init_method = dimred::EmbedMethod::pca;
        else if (f.init == "spectral")
            cfg.init_method = dimred::EmbedMethod::spectral;
        else
            cfg.init_method = dimred::EmbedMethod::random;
    }
    if (passed("--min-dist")) cfg.min_dist = f.min_dist;
    if (passed("--spread")) cfg.spread = f.spread;
    if (passed("--n-iters")) cfg.n_iters = f.n_iters;
    if (passed("--learning-rate")) cfg.learning_rate = f.learning_rate;
    if (passed("--neg-samples")) cfg.neg_samples = f.neg_samples;
    if (passed("--subsample")) cfg.subsample = f.subsample;
    if (passed("--betti-grid")) cfg.betti_grid = f.betti_grid;
    if (passed("--test-fraction")) cfg.test_fraction = f.test_fraction;
    if (passed("--context-k")) cfg.context_k = f.context_k;
    if (passed("--threads")) cfg.n_threads = f.threads;
    if (passed("--exact-repulsion")) cfg.exact_repulsion = f.exact_repulsion;
    // Only the metrics subcommand registers --metrics.
    const CLI::Option* metrics_opt = cmd->get_option_no_throw("--metrics");
    if (metrics_opt != nullptr && metrics_opt->count() > 0) {
        cfg.metrics.clear();
        cfg.metrics.insert(f.metrics.begin(), f.metrics.end());
    }
    return cfg;
}

void print_artifacts(const dimred::RunArtifacts& art) {
    std::cout << "init_embedding: " << art.init_embedding_path << "\n";
    std::cout << "layout: " << art.layout_path << "\n";
    if (!art.plot_path.empty()) std::cout << "plot: " << art.plot_path << "\n";
    std::cout << "metrics: " << art.metrics_path << "\n";
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dimensionality reduction with structure-preservation metrics"};
    app.require_subcommand(1);

    RunFlags gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV");
    add_dataset_flags(generate, gen);
    generate->add_option("--seed", gen.seed, "Generator seed");
    generate->add_option("--out", gen.out, "Output CSV path")->required();

    RunFlags emb;
    auto* embed = app.add_subcommand("embed", "Run the embedding pipeline without metrics");
    add_run_flags(embed, emb);

    RunFlags met;
    auto* metrics = app.add_subcommand("metrics", "Run the pipeline and the full metric suite");
    add_run_flags(metrics, met);
    metrics->add_option("--metrics", met.metrics, "Metric families to compute")
        ->check(CLI::IsMember({"stress", "neighborhood", "context", "global"}));

    struct {
        std::string x, y, labels, out;
        std::vector<std::string> metrics;
        dimred::CompareOptions options;
        std::uint64_t seed = 0;
    } cmp;
    auto* compare = app.add_subcommand("compare", "Compare two embeddings of the same rows");
    compare->add_option("--x", cmp.x, "Reference embedding CSV")->required();
    compare->add_option("--y", cmp.y, "Candidate embedding CSV")->required();
    compare->add_option("--labels", cmp.labels, "Integer labels, one per row");
    compare->add_option("--out", cmp.out, "Metrics JSON path (default: stdout)");
    compare->add_option("--metrics", cmp.metrics, "Metric families to compute")
        ->check(CLI::IsMember({"stress", "neighborhood", "context", "global"}));
    compare->add_option("--n-neighbors", cmp.options.n_neighbors, "kNN graph size");
    compare->add_option("--subsample", cmp.options.subsample, "Subsample for global metrics");
    compare->add_option("--betti-grid", cmp.options.betti_grid, "Betti curve grid resolution");
    compare->add_option("--test-fraction", cmp.options.test_fraction, "Held-out fraction");
    compare->add_option("--context-k", cmp.options.context_k, "k for the context classifier");
    compare->add_option("--seed", cmp.seed, "Seed for subsampling and splits");

    std::string suite_path;
    auto* benchmark = app.add_subcommand("benchmark", "Run a scenario suite from a JSON config");
    benchmark->add_option("--config", suite_path, "Suite config JSON")->required();

    struct {
        std::string in, labels, out;
        int width = 800, height = 600;
    } plt;
    auto* plot = app.add_subcommand("plot", "Render an embedding CSV as an SVG scatter plot");
    plot->add_option("--in", plt.in, "Embedding CSV")->required();
    plot->add_option("--labels", plt.labels, "Integer labels, one per row");
    plot->add_option("--out", plt.out, "SVG output path")->required();
    plot->add_option("--width", plt.width, "SVG width in pixels");
    plot->add_option("--height", plt.height, "SVG height in pixels");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // Help and version exit 0; every command-line mistake is a
        // validation failure.
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (generate->parsed()) {
            dimred::DatasetSpec spec;
            spec.kind = gen.kind;
            spec.n_points = gen.n_points;
            spec.n_blobs = gen.n_blobs;
            spec.dim = gen.data_dim;
            spec.blob_std = gen.blob_std;
            spec.box_scale = gen.box_scale;
            spec.radius = gen.radius;
            spec.noise_std = gen.noise_std;
            spec.standardize = gen.standardize;
            const dimred::PointCloud cloud = dimred::make_dataset(spec, dimred::Seed{gen.seed});
            dimred::save_csv(cloud, gen.out);
            std::cout << "dataset: " << gen.out << " (" << cloud.n() << " x " << cloud.dim()
                      << ")\n";
        } else if (embed->parsed()) {
            dimred::PipelineConfig cfg = build_config(embed, emb);
            cfg.metrics.clear();
            print_artifacts(dimred::run_pipeline(cfg));
        } else if (metrics->parsed()) {
            print_artifacts(dimred::run_pipeline(build_config(metrics, met)));
        } else if (compare->parsed()) {
            if (compare->count("--metrics")) {
                cmp.options.metrics.clear();
                cmp.options.metrics.insert(cmp.metrics.begin(), cmp.metrics.end());
            }
            cmp.options.seed = dimred::Seed{cmp.seed};
            const std::optional<std::string> labels =
                cmp.labels.empty() ? std::nullopt : std::optional<std::string>(cmp.labels);
            const nlohmann::json doc = dimred::compare_embeddings(cmp.x, cmp.y, labels, cmp.options);
            if (cmp.out.empty()) {
                std::cout << doc.dump(2) << "\n";
            } else {
                std::ofstream out(cmp.out);
                if (!out) throw dimred::Error(dimred::ErrorCode::io_error, "cannot write " + cmp.out);
                out << doc.dump(2) << "\n";
                std::cout << "metrics: " << cmp.out << "\n";
            }
        } else if (benchmark->parsed()) {
            const dimred::SuiteResult r = dimred::run_benchmark_suite(suite_path);
            std::cout << "summary: " << r.summary_path << "\n";
            std::cout << "scenarios: " << r.n_scenarios << ", failed: " << r.n_failed << "\n";
            if (r.n_failed > 0) return 1;
        } else if (plot->parsed()) {
            const dimred::PointCloud cloud = dimred::load_csv(plt.in);
            dimred::Embedding e;
            e.coords = cloud.coords();
            e.method = dimred::EmbedMethod::layout;
            e.source_n = static_cast<int>(cloud.n());
            std::optional<std::vector<int>> labels;
            if (!plt.labels.empty()) labels = dimred::load_labels(plt.labels);
            dimred::render_scatter_svg(e, labels, plt.out, plt.width, plt.height);
            std::cout << "plot: " << plt.out << "\n";
        }
    } catch (const dimred::Error& e) {
        std::cerr << "error [" << dimred::error_code_name(e.code()) << "] " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "error [Internal] " << e.what() << "\n";
        return 3;
    }
    return 0;
}
