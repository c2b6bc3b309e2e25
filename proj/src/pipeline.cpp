#include "dimred/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dimred/error.hpp"
#include "dimred/svg.hpp"

namespace dimred {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Independent RNG streams per pipeline stage, all derived from the run seed.
constexpr std::uint64_t kSaltDataset = 0xd4;
constexpr std::uint64_t kSaltInit = 0x1e;
constexpr std::uint64_t kSaltLayout = 0x7a;
constexpr std::uint64_t kSaltGlobal = 0x9c;
constexpr std::uint64_t kSaltDistortion = 0x4f;
constexpr std::uint64_t kSaltSplit = 0x3d;

class StageTimer {
public:
    StageTimer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

// JSON has no infinity literal; infinite metric values serialize as the
// strings "inf"/"-inf" (documented in docs/metrics_schema.json).
json json_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0.0 ? "inf" : "-inf";
    return v;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

[[noreturn]] void bad_config(const std::string& what) {
    throw Error(ErrorCode::config_invalid, what);
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key())) bad_config("unknown key '" + it.key() + "' in " + where);
}

template <typename T>
T get_field(const json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        bad_config("field '" + key + "' has the wrong type");
    }
}

DatasetSpec dataset_from_json(const json& j) {
    if (!j.is_object()) bad_config("'dataset' must be an object");
    check_keys(j,
               {"kind", "n_points", "n_blobs", "dim", "blob_std", "box_scale", "radius",
                "noise_std", "path", "label_column", "standardize"},
               "dataset");
    DatasetSpec spec;
    spec.kind = get_field<std::string>(j, "kind", spec.kind);
    if (spec.kind != "blobs" && spec.kind != "disk" && spec.kind != "moons" && spec.kind != "csv")
        bad_config("unknown dataset kind '" + spec.kind + "'");
    spec.n_points = get_field<int>(j, "n_points", spec.n_points);
    spec.n_blobs = get_field<int>(j, "n_blobs", spec.n_blobs);
    spec.dim = get_field<int>(j, "dim", spec.dim);
    spec.blob_std = get_field<double>(j, "blob_std", spec.blob_std);
    spec.box_scale = get_field<double>(j, "box_scale", spec.box_scale);
    spec.radius = get_field<double>(j, "radius", spec.radius);
    spec.noise_std = get_field<double>(j, "noise_std", spec.noise_std);
    spec.path = get_field<std::string>(j, "path", spec.path);
    if (j.contains("label_column") && !j.at("label_column").is_null())
        spec.label_column = get_field<std::string>(j, "label_column", "");
    spec.standardize = get_field<bool>(j, "standardize", spec.standardize);
    if (spec.kind == "csv" && spec.path.empty()) bad_config("csv dataset needs a 'path'");
    return spec;
}

json dataset_to_json(const DatasetSpec& spec) {
    json j;
    j["kind"] = spec.kind;
    j["standardize"] = spec.standardize;
    if (spec.kind == "csv") {
        j["path"] = spec.path;
        j["label_column"] = spec.label_column ? json(*spec.label_column) : json(nullptr);
        return j;
    }
    j["n_points"] = spec.n_points;
    if (spec.kind == "blobs") {
        j["n_blobs"] = spec.n_blobs;
        j["dim"] = spec.dim;
        j["blob_std"] = spec.blob_std;
        j["box_scale"] = spec.box_scale;
    } else if (spec.kind == "disk") {
        j["radius"] = spec.radius;
    } else {
        j["noise_std"] = spec.noise_std;
    }
    return j;
}

void check_metric_names(const std::set<std::string>& metrics) {
    static const std::set<std::string> known = {"stress", "neighborhood", "context", "global"};
    for (const auto& m : metrics)
        if (!known.count(m)) bad_config("unknown metric name '" + m + "'");
}

void validate_config(const PipelineConfig& c) {
    if (c.n_neighbors < 1) bad_config("n_neighbors must be >= 1");
    if (c.dimension < 1) bad_config("dimension must be >= 1");
    if (!(c.min_dist > 0.0)) bad_config("min_dist must be > 0");
    if (!(c.spread > 0.0)) bad_config("spread must be > 0");
    if (c.n_iters < 0) bad_config("n_iters must be >= 0");
    if (!(c.learning_rate > 0.0)) bad_config("learning_rate must be > 0");
    if (c.neg_samples < 1) bad_config("neg_samples must be >= 1");
    if (c.subsample < 8) bad_config("subsample must be >= 8");
    if (c.betti_grid < 2) bad_config("betti_grid must be >= 2");
    if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0))
        bad_config("test_fraction must be in (0, 1)");
    if (c.context_k < 1) bad_config("context_k must be >= 1");
    if (c.n_threads < 0) bad_config("threads must be >= 0");
    if (c.output_dir.empty()) bad_config("output_dir must be non-empty");
    check_metric_names(c.metrics);
}

// Flattens one metrics document into (metric, value) summary rows.
void flatten_metrics(const json& doc, std::vector<std::pair<std::string, std::string>>& rows) {
    auto value_str = [](const json& v) -> std::string {
        if (v.is_number()) return format_double(v.get<double>());
        if (v.is_string()) return v.get<std::string>();
        return v.dump();
    };
    if (doc.contains("stress") && !doc["stress"].is_null()) {
        rows.emplace_back("stress_sigma", value_str(doc["stress"]["sigma"]));
        rows.emplace_back("stress_mean", value_str(doc["stress"]["mean"]));
        rows.emplace_back("stress_max", value_str(doc["stress"]["max"]));
    }
    if (doc.contains("neighborhood") && !doc["neighborhood"].is_null()) {
        rows.emplace_back("neighborhood_mean", value_str(doc["neighborhood"]["mean"]));
        rows.emplace_back("neighborhood_std", value_str(doc["neighborhood"]["std"]));
    }
    if (doc.contains("context") && !doc["context"].is_null()) {
        rows.emplace_back("context_kappa_svm", value_str(doc["context"]["kappa_svm"]));
        rows.emplace_back("context_kappa_knn", value_str(doc["context"]["kappa_knn"]));
        rows.emplace_back("context_alpha_x", value_str(doc["context"]["alpha_x"]));
        rows.emplace_back("context_alpha_y", value_str(doc["context"]["alpha_y"]));
    }
    if (doc.contains("global") && !doc["global"].is_null()) {
        for (const char* dim : {"dim0", "dim1"})
            for (const char* metric : {"bottleneck", "wasserstein", "dtw", "twed", "emd"})
                rows.emplace_back(std::string("global_") + dim + "_" + metric,
                                  value_str(doc["global"][dim][metric]));
    }
    if (doc.contains("distortion") && !doc["distortion"].is_null())
        rows.emplace_back("distortion_mean", value_str(doc["distortion"]["mean"]));
    if (doc.contains("timing"))
        for (auto it = doc["timing"].begin(); it != doc["timing"].end(); ++it)
            rows.emplace_back("time_" + it.key(), value_str(it.value()));
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

json stress_json(const StressReport& r) {
    return json{{"sigma", json_number(r.sigma)}, {"mean", json_number(r.mean)},
                {"std", json_number(r.std)},     {"max", json_number(r.max)},
                {"n_edges", r.n_edges},          {"n_clamped", r.n_clamped}};
}

json neighborhood_json(const NeighborhoodReport& r) {
    return json{{"mean", json_number(r.mean)}, {"std", json_number(r.std)}, {"k", r.k}};
}

json context_json(const ContextReport& r) {
    return json{{"alpha_x", json_number(r.alpha_x)},
                {"alpha_y", json_number(r.alpha_y)},
                {"alpha_x_knn", json_number(r.alpha_x_knn)},
                {"alpha_y_knn", json_number(r.alpha_y_knn)},
                {"kappa_svm", json_number(r.kappa_svm)},
                {"kappa_knn", json_number(r.kappa_knn)},
                {"split_seed", r.split_seed.value},
                {"test_fraction", json_number(r.test_fraction)},
                {"clamped", r.clamped}};
}

json global_json(const GlobalReport& r) {
    json g;
    for (int dim = 0; dim <= 1; ++dim) {
        const GlobalDimReport& d = r.dims[dim];
        g[dim == 0 ? "dim0" : "dim1"] = json{{"bottleneck", json_number(d.bottleneck)},
                                             {"wasserstein", json_number(d.wasserstein)},
                                             {"dtw", json_number(d.dtw)},
                                             {"twed", json_number(d.twed)},
                                             {"emd", json_number(d.emd)}};
    }
    g["subsample"] = r.subsample_size;
    g["seed"] = r.seed.value;
    return g;
}

json distortion_json(const DistortionStats& s) {
    return json{{"mean", json_number(s.mean)},
                {"min", json_number(s.min)},
                {"max", json_number(s.max)},
                {"std", json_number(s.std)},
                {"n_pairs", s.n_pairs}};
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorCode::io_error, "failed while writing " + path);
}

void write_meta_json(const Embedding& e, const std::optional<PcaInfo>& pca,
                     const std::string& path) {
    json j;
    j["method"] = embed_method_name(e.method);
    j["source_n"] = e.source_n;
    j["params"] = json::object();
    for (const auto& [k, v] : e.params) j["params"][k] = v;
    if (pca) {
        json p;
        p["epsilon"] = json_number(pca->epsilon);
        p["frobenius_norm"] = json_number(pca->frobenius_norm);
        p["singular_values"] = json::array();
        for (double s : pca->singular_values) p["singular_values"].push_back(json_number(s));
        j["pca"] = p;
    }
    write_text(path, j.dump(2) + "\n");
}

// Layout-scale normalization: center, then scale so the root-mean-square
// point norm is 10 * min_dist. The kernel's response is scale-sensitive and
// initializers produce arbitrary scales.
void rescale_for_layout(Matrix& coords, double min_dist) {
    Eigen::RowVectorXd mean = coords.colwise().mean();
    coords.rowwise() -= mean;
    const double rms =
        std::sqrt(coords.squaredNorm() / static_cast<double>(coords.rows()));
    if (rms > 0.0) coords *= (10.0 * min_dist) / rms;
}

template <typename F>
auto run_stage(const char* stage, F&& f) {
    try {
        return f();
    } catch (const Error& e) {
        throw Error(e.code(), std::string(stage) + ": " + e.what());
    }
}

} // namespace

std::vector<int> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::missing_file, "cannot open " + path);
    std::vector<int> labels;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string t;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) t.push_back(c);
        if (t.empty()) continue;
        try {
            std::size_t used = 0;
            const int v = std::stoi(t, &used);
            if (used != t.size()) throw std::invalid_argument(t);
            labels.push_back(v);
        } catch (const std::exception&) {
            if (row == 0) {
                ++row;
                continue; // header line
            }
            throw Error(ErrorCode::parse_error, path + ": '" + t + "' is not an integer label");
        }
        ++row;
    }
    if (labels.empty()) throw Error(ErrorCode::empty_dataset, path + " has no labels");
    return labels;
}

PipelineConfig config_from_json(const json& j) {
    if (!j.is_object()) bad_config("config must be a JSON object");
    check_keys(j,
               {"name",        "dataset",     "n_neighbors",   "dimension",  "init",
                "min_dist",    "spread",      "n_iters",       "learning_rate", "neg_samples",
                "seed",        "metrics",     "subsample",     "betti_grid", "test_fraction",
                "context_k",   "threads",     "exact_repulsion", "output_dir"},
               "config");
    PipelineConfig c;
    c.name = get_field<std::string>(j, "name", c.name);
    if (!j.contains("dataset")) bad_config("config needs a 'dataset' object");
    c.dataset = dataset_from_json(j.at("dataset"));
    c.n_neighbors = get_field<int>(j, "n_neighbors", c.n_neighbors);
    c.dimension = get_field<int>(j, "dimension", c.dimension);
    const std::string init = get_field<std::string>(j, "init", "random");
    if (init == "random")
        c.init_method = EmbedMethod::random;
    else if (init == "pca")
        c.init_method = EmbedMethod::pca;
    else if (init == "spectral")
        c.init_method = EmbedMethod::spectral;
    else
        bad_config("unknown init method '" + init + "'");
    c.min_dist = get_field<double>(j, "min_dist", c.min_dist);
    c.spread = get_field<double>(j, "spread", c.spread);
    c.n_iters = get_field<int>(j, "n_iters", c.n_iters);
    c.learning_rate = get_field<double>(j, "learning_rate", c.learning_rate);
    c.neg_samples = get_field<int>(j, "neg_samples", c.neg_samples);
    c.seed = Seed{get_field<std::uint64_t>(j, "seed", 0)};
    if (j.contains("metrics")) {
        if (!j.at("metrics").is_array()) bad_config("'metrics' must be an array of names");
        c.metrics.clear();
        for (const auto& m : j.at("metrics")) {
            if (!m.is_string()) bad_config("'metrics' must be an array of names");
            c.metrics.insert(m.get<std::string>());
        }
    }
    c.subsample = get_field<int>(j, "subsample", c.subsample);
    c.betti_grid = get_field<int>(j, "betti_grid", c.betti_grid);
    c.test_fraction = get_field<double>(j, "test_fraction", c.test_fraction);
    c.context_k = get_field<int>(j, "context_k", c.context_k);
    c.n_threads = get_field<int>(j, "threads", c.n_threads);
    c.exact_repulsion = get_field<bool>(j, "exact_repulsion", c.exact_repulsion);
    c.output_dir = get_field<std::string>(j, "output_dir", c.output_dir);
    validate_config(c);
    return c;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::missing_file, "cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::config_invalid, path + ": " + e.what());
    }
    return config_from_json(j);
}

json config_to_json(const PipelineConfig& c) {
    json j;
    j["name"] = c.name;
    j["dataset"] = dataset_to_json(c.dataset);
    j["n_neighbors"] = c.n_neighbors;
    j["dimension"] = c.dimension;
    j["init"] = embed_method_name(c.init_method);
    j["min_dist"] = c.min_dist;
    j["spread"] = c.spread;
    j["n_iters"] = c.n_iters;
    j["learning_rate"] = c.learning_rate;
    j["neg_samples"] = c.neg_samples;
    j["seed"] = c.seed.value;
    j["metrics"] = json::array();
    for (const auto& m : c.metrics) j["metrics"].push_back(m);
    j["subsample"] = c.subsample;
    j["betti_grid"] = c.betti_grid;
    j["test_fraction"] = c.test_fraction;
    j["context_k"] = c.context_k;
    j["threads"] = c.n_threads;
    j["exact_repulsion"] = c.exact_repulsion;
    j["output_dir"] = c.output_dir;
    return j;
}

PointCloud make_dataset(const DatasetSpec& spec, Seed seed) {
    PointCloud cloud = [&] {
        if (spec.kind == "blobs")
            return generate_blobs(spec.n_points, spec.n_blobs, spec.dim, spec.blob_std,
                                  spec.box_scale, seed);
        if (spec.kind == "disk") return generate_disk_uniform(spec.n_points, spec.radius, seed);
        if (spec.kind == "moons") return generate_half_moons(spec.n_points, spec.noise_std, seed);
        if (spec.kind == "csv") return load_csv(spec.path, spec.label_column);
        throw Error(ErrorCode::config_invalid, "unknown dataset kind '" + spec.kind + "'");
    }();
    if (spec.standardize) cloud = standardize(cloud);
    return cloud;
}

RunArtifacts run_pipeline(const PipelineConfig& config) {
    validate_config(config);
    fs::create_directories(config.output_dir);
    const fs::path out_dir(config.output_dir);

    RunArtifacts artifacts;
    const StageTimer total_timer;

    StageTimer ingest_timer;
    const PointCloud cloud = run_stage("ingest", [&] {
        return make_dataset(config.dataset, Seed{derive_seed(config.seed.value, kSaltDataset)});
    });
    artifacts.timing["ingest"] = ingest_timer.seconds();

    StageTimer knn_timer;
    const KnnGraph graph = run_stage(
        "knn", [&] { return build_knn(cloud, config.n_neighbors, 64, config.n_threads); });
    const EdgeSet edges = symmetrize(graph);
    artifacts.timing["knn"] = knn_timer.seconds();

    StageTimer init_timer;
    std::optional<PcaInfo> pca_info;
    Embedding init = run_stage("init", [&] {
        switch (config.init_method) {
            case EmbedMethod::pca: {
                auto [e, info] = pca_embedding(cloud, config.dimension);
                pca_info = std::move(info);
                return std::move(e);
            }
            case EmbedMethod::spectral: {
                // Scale-free default bandwidth: median of all kNN distances.
                std::vector<double> dists(graph.distances.data(),
                                          graph.distances.data() + graph.distances.size());
                std::nth_element(dists.begin(), dists.begin() + dists.size() / 2, dists.end());
                const double bandwidth = std::max(dists[dists.size() / 2], 1e-12);
                return spectral_embedding(cloud, graph, config.dimension, bandwidth);
            }
            default:
                return random_projection(cloud, config.dimension,
                                         Seed{derive_seed(config.seed.value, kSaltInit)});
        }
    });
    artifacts.init_embedding_path = (out_dir / "init_embedding.csv").string();
    save_embedding_csv(init, artifacts.init_embedding_path);
    write_meta_json(init, pca_info, (out_dir / "init_embedding.meta.json").string());
    artifacts.timing["init"] = init_timer.seconds();

    StageTimer layout_timer;
    const Embedding layout = run_stage("layout", [&] {
        if (config.n_iters == 0) return init;
        LayoutParams lp;
        lp.n_iters = config.n_iters;
        lp.learning_rate_initial = config.learning_rate;
        lp.neg_samples_per_point = config.neg_samples;
        lp.kernel = fit_kernel(config.min_dist, config.spread);
        lp.seed = Seed{derive_seed(config.seed.value, kSaltLayout)};
        lp.exact_repulsion = config.exact_repulsion;
        lp.n_threads = config.n_threads;
        Embedding scaled = init;
        rescale_for_layout(scaled.coords, config.min_dist);
        return do_layout(scaled, edges, lp);
    });
    artifacts.layout_path = (out_dir / "layout.csv").string();
    save_embedding_csv(layout, artifacts.layout_path);
    write_meta_json(layout, std::nullopt, (out_dir / "layout.meta.json").string());
    artifacts.timing["layout"] = layout_timer.seconds();

    StageTimer metrics_timer;
    json doc;
    doc["config_echo"] = config_to_json(config);
    doc["stress"] = nullptr;
    doc["neighborhood"] = nullptr;
    doc["context"] = nullptr;
    doc["global"] = nullptr;
    run_stage("metrics", [&] {
        if (config.metrics.count("stress"))
            doc["stress"] = stress_json(embedding_stress(cloud, layout, graph));
        if (config.metrics.count("neighborhood"))
            doc["neighborhood"] =
                neighborhood_json(neighborhood_preservation(cloud, layout, config.n_neighbors));
        if (config.metrics.count("context"))
            doc["context"] = context_json(context_loss(
                cloud, layout, config.test_fraction, config.context_k,
                Seed{derive_seed(config.seed.value, kSaltSplit)}));
        if (config.metrics.count("global"))
            doc["global"] = global_json(global_structure_report(
                cloud, layout, std::min<int>(config.subsample, static_cast<int>(cloud.n())),
                config.betti_grid, Seed{derive_seed(config.seed.value, kSaltGlobal)}));
        doc["distortion"] = distortion_json(distortion_stats(
            cloud, layout, 10000, Seed{derive_seed(config.seed.value, kSaltDistortion)}));
        return 0;
    });
    artifacts.timing["metrics"] = metrics_timer.seconds();

    if (config.dimension >= 2) {
        StageTimer plot_timer;
        artifacts.plot_path = (out_dir / "plot.svg").string();
        run_stage("plot", [&] {
            render_scatter_svg(layout, cloud.labels(), artifacts.plot_path);
            return 0;
        });
        artifacts.timing["plot"] = plot_timer.seconds();
    }
    artifacts.timing["total"] = total_timer.seconds();

    json timing;
    for (const auto& [stage, secs] : artifacts.timing) timing[stage] = json_number(secs);
    doc["timing"] = timing;
    artifacts.metrics_path = (out_dir / "metrics.json").string();
    write_text(artifacts.metrics_path, doc.dump(2) + "\n");
    return artifacts;
}

json compare_embeddings(const std::string& x_csv, const std::string& y_csv,
                        const std::optional<std::string>& labels_csv,
                        const CompareOptions& options) {
    check_metric_names(options.metrics);
    const PointCloud x_raw = load_csv(x_csv);
    const PointCloud y_raw = load_csv(y_csv);
    if (x_raw.n() != y_raw.n())
        throw Error(ErrorCode::row_count_mismatch,
                    x_csv + " has " + std::to_string(x_raw.n()) + " rows but " + y_csv + " has " +
                        std::to_string(y_raw.n()));

    std::optional<std::vector<int>> labels;
    if (labels_csv) {
        labels = load_labels(*labels_csv);
        if (static_cast<Eigen::Index>(labels->size()) != x_raw.n())
            throw Error(ErrorCode::row_count_mismatch, "label count does not match data rows");
    }
    const PointCloud x(x_raw.coords(), labels, x_raw.name());
    Embedding y;
    y.coords = y_raw.coords();
    y.method = EmbedMethod::layout;
    y.source_n = static_cast<int>(x.n());
    y.params["source"] = y_csv;

    const StageTimer total_timer;
    json doc;
    doc["config_echo"] = json{{"x_csv", x_csv},
                              {"y_csv", y_csv},
                              {"labels_csv", labels_csv ? json(*labels_csv) : json(nullptr)},
                              {"n_neighbors", options.n_neighbors},
                              {"subsample", options.subsample},
                              {"betti_grid", options.betti_grid},
                              {"test_fraction", options.test_fraction},
                              {"context_k", options.context_k},
                              {"seed", options.seed.value}};
    doc["stress"] = nullptr;
    doc["neighborhood"] = nullptr;
    doc["context"] = nullptr;
    doc["global"] = nullptr;

    if (options.metrics.count("stress")) {
        const KnnGraph graph = build_knn(x, options.n_neighbors);
        doc["stress"] = stress_json(embedding_stress(x, y, graph));
    }
    if (options.metrics.count("neighborhood"))
        doc["neighborhood"] =
            neighborhood_json(neighborhood_preservation(x, y, options.n_neighbors));
    if (options.metrics.count("context")) {
        if (!labels)
            throw Error(ErrorCode::unlabeled_data,
                        "context metrics need a labels file (--labels)");
        doc["context"] = context_json(context_loss(
            x, y, options.test_fraction, options.context_k,
            Seed{derive_seed(options.seed.value, kSaltSplit)}));
    }
    if (options.metrics.count("global"))
        doc["global"] = global_json(global_structure_report(
            x, y, std::min<int>(options.subsample, static_cast<int>(x.n())), options.betti_grid,
            Seed{derive_seed(options.seed.value, kSaltGlobal)}));
    doc["distortion"] = distortion_json(distortion_stats(
        x, y, 10000, Seed{derive_seed(options.seed.value, kSaltDistortion)}));
    doc["timing"] = json{{"total", json_number(total_timer.seconds())}};
    return doc;
}

SuiteResult run_benchmark_suite(const std::string& suite_config_path) {
    std::ifstream in(suite_config_path);
    if (!in) throw Error(ErrorCode::missing_file, "cannot open " + suite_config_path);
    json suite;
    try {
        in >> suite;
    } catch (const json::exception& e) {
        throw Error(ErrorCode::suite_config_invalid, suite_config_path + ": " + e.what());
    }
    if (!suite.is_object() || !suite.contains("scenarios") || !suite["scenarios"].is_array() ||
        suite["scenarios"].empty())
        throw Error(ErrorCode::suite_config_invalid,
                    "suite config needs a non-empty 'scenarios' array");
    for (auto it = suite.begin(); it != suite.end(); ++it)
        if (it.key() != "scenarios" && it.key() != "output_dir")
            throw Error(ErrorCode::suite_config_invalid,
                        "unknown key '" + it.key() + "' in suite config");

    const std::string out_root = suite.value("output_dir", std::string("bench_out"));
    fs::create_directories(out_root);

    SuiteResult result;
    result.n_scenarios = static_cast<int>(suite["scenarios"].size());
    std::vector<std::array<std::string, 4>> rows;
    for (std::size_t i = 0; i < suite["scenarios"].size(); ++i) {
        const json& sc = suite["scenarios"][i];
        std::string name = "scenario_" + std::to_string(i);
        if (sc.is_object() && sc.contains("name") && sc["name"].is_string())
            name = sc["name"].get<std::string>();
        try {
            PipelineConfig cfg = config_from_json(sc);
            cfg.name = name;
            if (!sc.contains("output_dir"))
                cfg.output_dir = (fs::path(out_root) / name).string();
            const RunArtifacts art = run_pipeline(cfg);
            std::ifstream metrics_in(art.metrics_path);
            json doc;
            metrics_in >> doc;
            std::vector<std::pair<std::string, std::string>> flat;
            flatten_metrics(doc, flat);
            for (const auto& [metric, value] : flat) rows.push_back({name, metric, value, ""});
        } catch (const std::exception& e) {
            rows.push_back({name, "error", "", e.what()});
            ++result.n_failed;
            std::cerr << "scenario '" << name << "' failed: " << e.what() << "\n";
        }
    }

    result.summary_path = (fs::path(out_root) / "summary.csv").string();
    std::ofstream out(result.summary_path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + result.summary_path);
    out << "scenario,metric,value,error\n";
    for (const auto& row : rows)
        out << csv_escape(row[0]) << ',' << csv_escape(row[1]) << ',' << csv_escape(row[2]) << ','
            << csv_escape(row[3]) << '\n';
    return result;
}

} // namespace dimred
