#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include <json.hpp>

#include "dimred/dataset.hpp"
#include "dimred/embed.hpp"
#include "dimred/knn.hpp"
#include "dimred/layout.hpp"
#include "dimred/metrics.hpp"
#include "dimred/persistence.hpp"

namespace dimred {

/// Where a run's point cloud comes from: a built-in generator or a CSV file.
struct DatasetSpec {
    std::string kind = "blobs"; // blobs | disk | moons | csv
    int n_points = 2000;
    int n_blobs = 12;
    int dim = 50;
    double blob_std = 1.0;
    double box_scale = 10.0;
    double radius = 1.0;
    double noise_std = 0.1;
    std::string path;                        // csv only
    std::optional<std::string> label_column; // csv only
    bool standardize = false;
};

struct PipelineConfig {
    std::string name = "run";
    DatasetSpec dataset;
    int n_neighbors = 15;
    int dimension = 2;
    EmbedMethod init_method = EmbedMethod::random;
    double min_dist = 0.1;
    double spread = 1.0;
    int n_iters = 128;
    double learning_rate = 1.0;
    int neg_samples = 5;
    Seed seed;
    std::set<std::string> metrics = {"context", "global", "neighborhood", "stress"};
    int subsample = 512;
    int betti_grid = 200;
    double test_fraction = 0.3;
    int context_k = 10;
    int n_threads = 0;
    bool exact_repulsion = false;
    std::string output_dir = ".";
};

struct RunArtifacts {
    std::string init_embedding_path;
    std::string layout_path;
    std::string metrics_path;
    std::string plot_path;
    std::map<std::string, double> timing;
};

/// Strict parse: unknown keys, unknown metric names, unknown dataset kinds,
/// and out-of-range values are rejected with ConfigInvalid.
PipelineConfig config_from_json(const nlohmann::json& j);
PipelineConfig load_config(const std::string& path);
nlohmann::json config_to_json(const PipelineConfig& config);

/// Resolves the dataset spec into a point cloud (generator seeded from the
/// run seed, or CSV load), applying opt-in standardization.
PointCloud make_dataset(const DatasetSpec& spec, Seed seed);

/// Full run: ingest -> knn -> init -> layout -> metrics, writing
/// init_embedding.csv (+ .meta.json), layout.csv (+ .meta.json),
/// metrics.json, and plot.svg into output_dir. Wall-clock per stage lands
/// in both the returned artifacts and the metrics JSON "timing" key; every
/// other byte of output is deterministic per seed.
RunArtifacts run_pipeline(const PipelineConfig& config);

struct CompareOptions {
    std::set<std::string> metrics = {"global", "neighborhood", "stress"};
    int n_neighbors = 15;
    int subsample = 512;
    int betti_grid = 200;
    double test_fraction = 0.3;
    int context_k = 10;
    Seed seed;
};

/// Metrics for an externally produced embedding: x_csv is treated as the
/// high-dimensional data, y_csv as its embedding, with optional labels for
/// the context metrics. No pipeline stages run.
nlohmann::json compare_embeddings(const std::string& x_csv, const std::string& y_csv,
                                  const std::optional<std::string>& labels_csv,
                                  const CompareOptions& options);

struct SuiteResult {
    std::string summary_path;
    int n_scenarios = 0;
    int n_failed = 0;
};

/// Runs every scenario in the suite config, continuing past per-scenario
/// failures, and writes one summary CSV row per scenario and metric.
SuiteResult run_benchmark_suite(const std::string& suite_config_path);

/// Reads integer labels, one per line; a single non-numeric first line is
/// treated as a header.
std::vector<int> load_labels(const std::string& path);

} // namespace dimred
