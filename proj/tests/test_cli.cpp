#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "dimred/dataset.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::string& cli_binary() {
    static const std::string path = [] {
        const char* env = std::getenv("DIMRED_CLI");
        REQUIRE_MESSAGE(env != nullptr, "DIMRED_CLI must point at the CLI binary");
        return std::string(env);
    }();
    return path;
}

fs::path temp_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "dimred_test_cli" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

CliResult run_cli(const std::string& args, const fs::path& dir) {
    const fs::path out_file = dir / "stdout.txt";
    const fs::path err_file = dir / "stderr.txt";
    const std::string cmd = "\"" + cli_binary() + "\" " + args + " > \"" + out_file.string() +
                            "\" 2> \"" + err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    CliResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out_file);
    r.err = slurp(err_file);
    return r;
}

} // namespace

TEST_CASE("generate writes a labeled dataset csv") {
    const fs::path dir = temp_dir("generate");
    const fs::path csv = dir / "moons.csv";
    const CliResult r = run_cli(
        "generate --kind moons --n-points 50 --noise-std 0.05 --seed 3 --out \"" + csv.string() +
            "\"",
        dir);
    CHECK(r.code == 0);
    CHECK(r.out.find("dataset: ") != std::string::npos);
    const dimred::PointCloud cloud = dimred::load_csv(csv.string(), std::string("label"));
    CHECK(cloud.n() == 50);
    CHECK(cloud.dim() == 2);
    CHECK(cloud.labels().has_value());
}

TEST_CASE("embed produces artifacts without metric blocks") {
    const fs::path dir = temp_dir("embed");
    const CliResult r = run_cli(
        "embed --kind blobs --n-points 80 --n-blobs 2 --data-dim 4 --n-neighbors 4 "
        "--n-iters 4 --seed 1 --out \"" +
            dir.string() + "\"",
        dir);
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "init_embedding.csv"));
    CHECK(fs::exists(dir / "layout.csv"));
    CHECK(fs::exists(dir / "plot.svg"));
    const json doc = json::parse(slurp(dir / "metrics.json"));
    CHECK(doc["stress"].is_null());
    CHECK(doc["neighborhood"].is_null());
    CHECK(doc["context"].is_null());
    CHECK(doc["global"].is_null());
    CHECK(doc["distortion"].is_object());
}

TEST_CASE("metrics computes the requested families") {
    const fs::path dir = temp_dir("metrics");
    const CliResult r = run_cli(
        "metrics --kind blobs --n-points 100 --n-blobs 2 --data-dim 4 --n-neighbors 4 "
        "--n-iters 4 --seed 2 --metrics stress --metrics neighborhood --out \"" +
            dir.string() + "\"",
        dir);
    CHECK(r.code == 0);
    const json doc = json::parse(slurp(dir / "metrics.json"));
    CHECK(doc["stress"].is_object());
    CHECK(doc["neighborhood"].is_object());
    CHECK(doc["context"].is_null());
    CHECK(doc["global"].is_null());
    CHECK(doc["config_echo"]["metrics"] == json::array({"neighborhood", "stress"}));
}

TEST_CASE("compare prints json to stdout or a file") {
    const fs::path dir = temp_dir("compare");
    run_cli("embed --kind blobs --n-points 60 --n-blobs 2 --data-dim 3 --n-neighbors 4 "
            "--n-iters 2 --seed 4 --out \"" +
                dir.string() + "\"",
            dir);
    const std::string layout = (dir / "layout.csv").string();

    const CliResult to_stdout = run_cli(
        "compare --x \"" + layout + "\" --y \"" + layout +
            "\" --metrics stress --metrics neighborhood --n-neighbors 4",
        dir);
    CHECK(to_stdout.code == 0);
    const json doc = json::parse(to_stdout.out);
    CHECK(doc["stress"]["mean"] == 0.0);
    CHECK(doc["neighborhood"]["mean"] == 1.0);

    const fs::path out_file = dir / "cmp.json";
    const CliResult to_file = run_cli("compare --x \"" + layout + "\" --y \"" + layout +
                                          "\" --metrics stress --n-neighbors 4 --out \"" +
                                          out_file.string() + "\"",
                                      dir);
    CHECK(to_file.code == 0);
    CHECK(json::parse(slurp(out_file))["stress"]["max"] == 0.0);
}

TEST_CASE("plot renders an svg from a csv") {
    const fs::path dir = temp_dir("plot");
    const fs::path csv = dir / "pts.csv";
    run_cli("generate --kind disk --n-points 40 --seed 6 --out \"" + csv.string() + "\"", dir);
    const fs::path svg = dir / "pts.svg";
    const CliResult r =
        run_cli("plot --in \"" + csv.string() + "\" --out \"" + svg.string() + "\"", dir);
    CHECK(r.code == 0);
    const std::string body = slurp(svg);
    CHECK(body.rfind("<svg", 0) == 0);
    CHECK(body.find("</svg>") != std::string::npos);
}

TEST_CASE("validation failures exit 2") {
    const fs::path dir = temp_dir("exit2");
    CHECK(run_cli("frobnicate", dir).code == 2);
    CHECK(run_cli("generate --kind torus --out \"" + (dir / "x.csv").string() + "\"", dir).code ==
          2);
    CHECK(run_cli("generate --kind blobs", dir).code == 2);
    CHECK(run_cli("embed --init mystery --out \"" + dir.string() + "\"", dir).code == 2);
    const CliResult missing =
        run_cli("metrics --config \"" + (dir / "absent.json").string() + "\"", dir);
    CHECK(missing.code == 2);
    CHECK(missing.err.find("error [MissingFile]") != std::string::npos);
    CHECK(run_cli("embed --kind blobs --n-points 30 --n-neighbors 40 --out \"" + dir.string() +
                      "\"",
                  dir)
              .code == 2);
}

TEST_CASE("io failures exit 3 and help exits 0") {
    const fs::path dir = temp_dir("exit3");
    const CliResult r = run_cli(
        "generate --kind blobs --n-points 20 --n-blobs 2 --out \"" +
            (dir / "no_such" / "x.csv").string() + "\"",
        dir);
    CHECK(r.code == 3);
    CHECK(r.err.find("error [IoError]") != std::string::npos);

    CHECK(run_cli("--help", dir).code == 0);
    CHECK(run_cli("embed --help", dir).code == 0);
}

TEST_CASE("benchmark exits 1 on partial failure and 0 when clean") {
    const fs::path dir = temp_dir("benchmark");
    const json good_scenario = {
        {"name", "ok"},
        {"dataset", {{"kind", "blobs"}, {"n_points", 60}, {"n_blobs", 2}, {"dim", 3}}},
        {"n_neighbors", 4},
        {"n_iters", 2},
        {"metrics", {"stress"}},
        {"seed", 1}};
    const json bad_scenario = {{"name", "broken"},
                               {"dataset", {{"kind", "disk"}, {"n_points", 40}}},
                               {"n_neighbors", 4},
                               {"n_iters", 2},
                               {"metrics", {"context"}}};

    const json clean = {{"output_dir", (dir / "clean").string()},
                        {"scenarios", json::array({good_scenario})}};
    std::ofstream(dir / "clean.json") << clean.dump();
    const CliResult ok = run_cli("benchmark --config \"" + (dir / "clean.json").string() + "\"",
                                 dir);
    CHECK(ok.code == 0);
    CHECK(ok.out.find("failed: 0") != std::string::npos);
    CHECK(fs::exists(dir / "clean" / "summary.csv"));

    const json mixed = {{"output_dir", (dir / "mixed").string()},
                        {"scenarios", json::array({good_scenario, bad_scenario})}};
    std::ofstream(dir / "mixed.json") << mixed.dump();
    const CliResult partial =
        run_cli("benchmark --config \"" + (dir / "mixed.json").string() + "\"", dir);
    CHECK(partial.code == 1);
    CHECK(partial.out.find("failed: 1") != std::string::npos);
    const std::string summary = slurp(dir / "mixed" / "summary.csv");
    CHECK(summary.find("broken,error,,") != std::string::npos);
}
