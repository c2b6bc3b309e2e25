#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dimred/error.hpp"
#include "dimred/pipeline.hpp"

using namespace dimred;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dimred_test_pipeline" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

// Minimal JSON Schema walker covering the subset used by
// docs/metrics_schema.json: type (string or list), required, properties,
// additionalProperties, items, enum, anyOf, and local $ref into $defs.
class SchemaChecker {
  public:
    explicit SchemaChecker(const json& root) : root_(root) {}

    void validate(const json& value, const json& schema, const std::string& where) {
        if (schema.contains("$ref")) {
            const std::string ref = schema["$ref"].get<std::string>();
            REQUIRE_MESSAGE(ref.rfind("#/$defs/", 0) == 0, "unsupported ref ", ref);
            validate(value, root_["$defs"][ref.substr(8)], where);
            return;
        }
        if (schema.contains("anyOf")) {
            for (const auto& option : schema["anyOf"])
                if (matches(value, option)) return;
            FAIL(where, ": no anyOf branch matched ", value.dump());
            return;
        }
        if (schema.contains("type")) {
            REQUIRE_MESSAGE(type_ok(value, schema["type"]), where, ": type mismatch for ",
                            value.dump());
        }
        if (schema.contains("enum")) {
            bool found = false;
            for (const auto& allowed : schema["enum"]) found = found || allowed == value;
            REQUIRE_MESSAGE(found, where, ": value ", value.dump(), " not in enum");
        }
        if (value.is_object()) {
            if (schema.contains("required"))
                for (const auto& key : schema["required"])
                    REQUIRE_MESSAGE(value.contains(key.get<std::string>()), where,
                                    ": missing required key ", key.get<std::string>());
            const json props =
                schema.contains("properties") ? schema["properties"] : json::object();
            for (const auto& [key, sub] : value.items()) {
                if (props.contains(key)) {
                    validate(sub, props[key], where + "." + key);
                } else if (schema.contains("additionalProperties")) {
                    const auto& extra = schema["additionalProperties"];
                    if (extra.is_boolean()) {
                        REQUIRE_MESSAGE(extra.get<bool>(), where, ": unexpected key ", key);
                    } else {
                        validate(sub, extra, where + "." + key);
                    }
                }
            }
        }
        if (value.is_array() && schema.contains("items"))
            for (std::size_t i = 0; i < value.size(); ++i)
                validate(value[i], schema["items"], where + "[" + std::to_string(i) + "]");
    }

  private:
    bool matches(const json& value, const json& schema) {
        if (schema.contains("type") && !type_ok(value, schema["type"])) return false;
        if (schema.contains("enum")) {
            for (const auto& allowed : schema["enum"])
                if (allowed == value) return true;
            return false;
        }
        return true;
    }

    static bool type_ok(const json& value, const json& type) {
        if (type.is_array()) {
            for (const auto& t : type)
                if (single_type_ok(value, t.get<std::string>())) return true;
            return false;
        }
        return single_type_ok(value, type.get<std::string>());
    }

    static bool single_type_ok(const json& value, const std::string& type) {
        if (type == "object") return value.is_object();
        if (type == "array") return value.is_array();
        if (type == "string") return value.is_string();
        if (type == "boolean") return value.is_boolean();
        if (type == "integer") return value.is_number_integer();
        if (type == "number") return value.is_number();
        if (type == "null") return value.is_null();
        return false;
    }

    const json& root_;
};

PipelineConfig small_config(const fs::path& out) {
    PipelineConfig config;
    config.dataset.n_points = 150;
    config.dataset.n_blobs = 3;
    config.dataset.dim = 6;
    config.n_neighbors = 5;
    config.n_iters = 8;
    config.subsample = 32;
    config.betti_grid = 40;
    config.context_k = 5;
    config.seed = Seed{13};
    config.output_dir = out.string();
    return config;
}

} // namespace

TEST_CASE("config parses defaults and round trips") {
    // A config must say where its data comes from; everything else defaults.
    CHECK_THROWS_AS(config_from_json(json::object()), Error);
    const PipelineConfig defaults = config_from_json({{"dataset", {{"kind", "blobs"}}}});
    CHECK(defaults.name == "run");
    CHECK(defaults.dataset.kind == "blobs");
    CHECK(defaults.n_neighbors == 15);
    CHECK(defaults.dimension == 2);
    CHECK(defaults.init_method == EmbedMethod::random);
    CHECK(defaults.min_dist == 0.1);
    CHECK(defaults.spread == 1.0);
    CHECK(defaults.n_iters == 128);
    CHECK(defaults.neg_samples == 5);
    CHECK(defaults.metrics == std::set<std::string>{"context", "global", "neighborhood", "stress"});
    CHECK(defaults.subsample == 512);
    CHECK(defaults.betti_grid == 200);
    CHECK(defaults.test_fraction == 0.3);
    CHECK(defaults.context_k == 10);

    PipelineConfig config = defaults;
    config.name = "round";
    config.init_method = EmbedMethod::spectral;
    config.dataset.kind = "moons";
    config.dataset.noise_std = 0.05;
    config.metrics = {"stress"};
    const PipelineConfig back = config_from_json(config_to_json(config));
    CHECK(back.name == "round");
    CHECK(back.init_method == EmbedMethod::spectral);
    CHECK(back.dataset.kind == "moons");
    CHECK(back.dataset.noise_std == 0.05);
    CHECK(back.metrics == std::set<std::string>{"stress"});
    CHECK(config_to_json(back) == config_to_json(config));
}

TEST_CASE("config rejects unknown keys, bad types, and bad ranges") {
    auto expect_invalid = [](json j) {
        // Add a valid dataset so the intended field is what fails.
        if (!j.contains("dataset")) j["dataset"] = {{"kind", "blobs"}};
        try {
            config_from_json(j);
            FAIL("expected error for ", j.dump());
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::config_invalid);
        }
    };
    expect_invalid({{"n_neighbours", 10}});
    expect_invalid({{"dataset", {{"kind", "torus"}}}});
    expect_invalid({{"dataset", {{"kind", "csv"}}}});
    expect_invalid({{"dataset", {{"radius", "big"}}}});
    expect_invalid({{"n_neighbors", "many"}});
    expect_invalid({{"n_neighbors", 0}});
    expect_invalid({{"dimension", 0}});
    expect_invalid({{"min_dist", 0.0}});
    expect_invalid({{"spread", -1.0}});
    expect_invalid({{"n_iters", -1}});
    expect_invalid({{"learning_rate", 0.0}});
    expect_invalid({{"neg_samples", -1}});
    expect_invalid({{"metrics", {"stress", "vibes"}}});
    expect_invalid({{"subsample", 4}});
    expect_invalid({{"betti_grid", 1}});
    expect_invalid({{"test_fraction", 0.0}});
    expect_invalid({{"test_fraction", 1.0}});
    expect_invalid({{"context_k", 0}});
    expect_invalid({{"threads", -2}});
    expect_invalid({{"init", "mystery"}});
}

TEST_CASE("load_config surfaces io and parse failures") {
    const fs::path dir = temp_dir("load_config");
    try {
        load_config((dir / "absent.json").string());
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_file);
    }
    std::ofstream(dir / "broken.json") << "{ not json";
    try {
        load_config((dir / "broken.json").string());
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::config_invalid);
    }
    std::ofstream(dir / "ok.json")
        << R"({"name": "from_file", "n_iters": 4, "dataset": {"kind": "blobs"}})";
    const PipelineConfig config = load_config((dir / "ok.json").string());
    CHECK(config.name == "from_file");
    CHECK(config.n_iters == 4);
}

TEST_CASE("make_dataset dispatches on kind") {
    DatasetSpec spec;
    spec.kind = "blobs";
    spec.n_points = 60;
    spec.n_blobs = 3;
    spec.dim = 4;
    const PointCloud blobs = make_dataset(spec, Seed{5});
    CHECK(blobs.n() == 60);
    CHECK(blobs.dim() == 4);
    CHECK(blobs.labels().has_value());

    spec.kind = "disk";
    spec.radius = 2.0;
    const PointCloud disk = make_dataset(spec, Seed{5});
    CHECK(disk.dim() == 2);
    CHECK_FALSE(disk.labels().has_value());

    spec.kind = "moons";
    spec.noise_std = 0.02;
    const PointCloud moons = make_dataset(spec, Seed{5});
    CHECK(moons.dim() == 2);
    CHECK(moons.labels().has_value());

    spec.kind = "csv";
    spec.path = (temp_dir("make_dataset") / "points.csv").string();
    {
        std::ofstream out(spec.path);
        out << "a,b\n1,2\n3,4\n5,6\n";
    }
    const PointCloud csv = make_dataset(spec, Seed{5});
    CHECK(csv.n() == 3);
    CHECK(csv.dim() == 2);

    spec.standardize = true;
    const PointCloud standardized = make_dataset(spec, Seed{5});
    CHECK(standardized.coords().colwise().mean().cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("zero-iteration run copies the init embedding bytes") {
    const fs::path dir = temp_dir("zero_iter");
    PipelineConfig config = small_config(dir);
    config.n_iters = 0;
    config.metrics = {"stress"};
    const RunArtifacts artifacts = run_pipeline(config);
    CHECK(read_file(artifacts.init_embedding_path) == read_file(artifacts.layout_path));
}

TEST_CASE("metric selection controls which blocks are null") {
    const fs::path dir = temp_dir("selection");
    PipelineConfig config = small_config(dir);
    config.metrics = {"stress", "neighborhood"};
    run_pipeline(config);
    const json doc = json::parse(read_file(dir / "metrics.json"));
    CHECK(doc["stress"].is_object());
    CHECK(doc["neighborhood"].is_object());
    CHECK(doc["context"].is_null());
    CHECK(doc["global"].is_null());
    CHECK(doc["distortion"].is_object());
    CHECK(doc["timing"].contains("total"));
}

TEST_CASE("full metrics document obeys the published schema") {
    const fs::path dir = temp_dir("schema");
    PipelineConfig config = small_config(dir);
    const RunArtifacts artifacts = run_pipeline(config);
    const json doc = json::parse(read_file(artifacts.metrics_path));
    const json schema =
        json::parse(read_file(fs::path(DIMRED_SOURCE_DIR) / "docs" / "metrics_schema.json"));
    SchemaChecker checker(schema);
    checker.validate(doc, schema, "$");
    CHECK(doc["stress"].is_object());
    CHECK(doc["context"].is_object());
    CHECK(doc["global"].is_object());
    CHECK(fs::exists(artifacts.plot_path));
}

TEST_CASE("one-dimensional targets skip the plot") {
    const fs::path dir = temp_dir("no_plot");
    PipelineConfig config = small_config(dir);
    config.dimension = 1;
    config.metrics = {"stress"};
    const RunArtifacts artifacts = run_pipeline(config);
    CHECK(artifacts.plot_path.empty());
    CHECK_FALSE(fs::exists(dir / "plot.svg"));
    const json doc = json::parse(read_file(dir / "metrics.json"));
    CHECK_FALSE(doc["timing"].contains("plot"));
}

TEST_CASE("context metric on unlabeled data fails in the metrics stage") {
    const fs::path dir = temp_dir("unlabeled");
    PipelineConfig config = small_config(dir);
    config.dataset.kind = "disk";
    config.metrics = {"context"};
    try {
        run_pipeline(config);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unlabeled_data);
        CHECK(std::string(e.what()).find("metrics") != std::string::npos);
    }
}

TEST_CASE("compare of a file with itself is a perfect embedding") {
    const fs::path dir = temp_dir("compare_same");
    PipelineConfig config = small_config(dir);
    config.metrics = {"stress"};
    const RunArtifacts artifacts = run_pipeline(config);

    CompareOptions options;
    options.metrics = {"stress", "neighborhood"};
    options.n_neighbors = 5;
    const json doc =
        compare_embeddings(artifacts.layout_path, artifacts.layout_path, std::nullopt, options);
    CHECK(doc["stress"]["mean"] == 0.0);
    CHECK(doc["stress"]["max"] == 0.0);
    CHECK(doc["neighborhood"]["mean"] == 1.0);
    CHECK(doc["distortion"]["mean"] == 1.0);
    CHECK(doc["config_echo"]["x_csv"] == artifacts.layout_path);
}

TEST_CASE("compare validates row counts and label needs") {
    const fs::path dir = temp_dir("compare_bad");
    {
        std::ofstream out(dir / "x.csv");
        out << "a,b\n0,0\n1,0\n0,1\n1,1\n2,2\n0,2\n2,0\n1,2\n2,1\n3,3\n";
    }
    {
        std::ofstream out(dir / "y.csv");
        out << "a,b\n0,0\n1,0\n0,1\n";
    }
    CompareOptions options;
    options.metrics = {"stress"};
    options.n_neighbors = 2;
    try {
        compare_embeddings((dir / "x.csv").string(), (dir / "y.csv").string(), std::nullopt,
                           options);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::row_count_mismatch);
    }

    options.metrics = {"context"};
    try {
        compare_embeddings((dir / "x.csv").string(), (dir / "x.csv").string(), std::nullopt,
                           options);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::unlabeled_data);
    }
}

TEST_CASE("compare with labels computes context metrics") {
    const fs::path dir = temp_dir("compare_labels");
    PipelineConfig config = small_config(dir);
    config.metrics = {"stress"};
    run_pipeline(config);

    // Rebuild the source data to CSV alongside the produced layout.
    const PointCloud data = make_dataset(config.dataset, config.seed);
    save_csv(data, (dir / "x.csv").string());
    {
        std::ofstream out(dir / "labels.csv");
        out << "label\n";
        for (int v : *data.labels()) out << v << "\n";
    }
    CompareOptions options;
    options.metrics = {"context"};
    options.context_k = 5;
    const json doc = compare_embeddings((dir / "x.csv").string(), (dir / "layout.csv").string(),
                                        (dir / "labels.csv").string(), options);
    CHECK(doc["context"]["alpha_x"].is_number());
    CHECK(doc["context"]["kappa_knn"].is_number());
}

TEST_CASE("benchmark suite continues past failing scenarios") {
    const fs::path dir = temp_dir("benchmark");
    const json suite = {
        {"output_dir", (dir / "runs").string()},
        {"scenarios",
         {{{"name", "good"},
           {"dataset", {{"kind", "blobs"}, {"n_points", 80}, {"n_blobs", 2}, {"dim", 4}}},
           {"n_neighbors", 4},
           {"n_iters", 4},
           {"subsample", 16},
           {"betti_grid", 20},
           {"metrics", {"stress"}},
           {"seed", 3}},
          {{"name", "bad"},
           {"dataset", {{"kind", "disk"}, {"n_points", 50}}},
           {"n_neighbors", 4},
           {"n_iters", 2},
           {"metrics", {"context"}}}}}};
    const fs::path config_path = dir / "suite.json";
    std::ofstream(config_path) << suite.dump(2);

    const SuiteResult result = run_benchmark_suite(config_path.string());
    CHECK(result.n_scenarios == 2);
    CHECK(result.n_failed == 1);

    const std::string summary = read_file(result.summary_path);
    CHECK(summary.rfind("scenario,metric,value,error", 0) == 0);
    CHECK(summary.find("good,stress_mean,") != std::string::npos);
    CHECK(summary.find("good,time_total,") != std::string::npos);
    CHECK(summary.find("bad,error,,") != std::string::npos);
    CHECK(fs::exists(dir / "runs" / "good" / "metrics.json"));

    try {
        run_benchmark_suite((dir / "missing.json").string());
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_file);
    }
    std::ofstream(dir / "empty.json") << R"({"scenarios": []})";
    CHECK_THROWS_AS(run_benchmark_suite((dir / "empty.json").string()), Error);
}

TEST_CASE("load_labels accepts optional header") {
    const fs::path dir = temp_dir("labels");
    std::ofstream(dir / "with_header.csv") << "label\n0\n2\n1\n";
    CHECK(load_labels((dir / "with_header.csv").string()) == std::vector<int>{0, 2, 1});
    std::ofstream(dir / "plain.csv") << "3\n4\n";
    CHECK(load_labels((dir / "plain.csv").string()) == std::vector<int>{3, 4});
    try {
        load_labels((dir / "absent.csv").string());
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::missing_file);
    }
}
