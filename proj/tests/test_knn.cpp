#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "dimred/dataset.hpp"
#include "dimred/error.hpp"
#include "dimred/knn.hpp"
#include "oracles.hpp"

using namespace dimred;

TEST_CASE("knn matches the full-sort oracle, ties to the smaller index") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 12; ++trial) {
        const int n = std::uniform_int_distribution<int>(5, 120)(rng);
        const int d = std::uniform_int_distribution<int>(1, 6)(rng);
        const int k = std::uniform_int_distribution<int>(1, n - 1)(rng);
        Matrix x(n, d);
        std::uniform_int_distribution<int> grid(0, 2);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) x(i, j) = grid(rng);

        const KnnGraph graph = build_knn(PointCloud(x), k);
        std::vector<std::vector<int>> oi;
        std::vector<std::vector<double>> od;
        testoracle::knn(x, k, oi, od);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < k; ++t) {
                CHECK(graph.indices(i, t) ==
                      oi[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
                CHECK(graph.distances(i, t) ==
                      od[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)]);
            }
    }
}

TEST_CASE("knn rows are sorted and never contain the query") {
    const Matrix x = testoracle::random_matrix(60, 4, 5, 2.0);
    const KnnGraph graph = build_knn(PointCloud(x), 7);
    CHECK(graph.k == 7);
    for (int i = 0; i < 60; ++i)
        for (int t = 0; t < 7; ++t) {
            CHECK(graph.indices(i, t) != i);
            if (t > 0) CHECK(graph.distances(i, t) >= graph.distances(i, t - 1));
        }
}

TEST_CASE("knn independent of block size and thread count") {
    const Matrix x = testoracle::random_matrix(150, 5, 17, 2.0);
    const PointCloud cloud(x);
    const KnnGraph base = build_knn(cloud, 9, 64, 1);
    for (int block : {1, 3, 37, 200}) {
        const KnnGraph g = build_knn(cloud, 9, block, 1);
        CHECK((g.indices.array() == base.indices.array()).all());
        CHECK((g.distances.array() == base.distances.array()).all());
    }
    for (int threads : {2, 4}) {
        const KnnGraph g = build_knn(cloud, 9, 64, threads);
        CHECK((g.indices.array() == base.indices.array()).all());
        CHECK((g.distances.array() == base.distances.array()).all());
    }
}

TEST_CASE("knn parameter validation") {
    const Matrix x = testoracle::random_matrix(10, 3, 1, 1.0);
    const PointCloud cloud(x);
    CHECK_NOTHROW(build_knn(cloud, 9));
    try {
        build_knn(cloud, 10);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::k_too_large);
    }
    try {
        build_knn(cloud, 0);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::invalid_param);
    }
    try {
        build_knn(PointCloud(Matrix::Zero(1, 2)), 1);
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::empty_dataset);
    }
}

TEST_CASE("symmetrize deduplicates and orders undirected edges") {
    // Line with increasing gaps: each point's nearest neighbor is its left
    // neighbor except 0, whose nearest is 1.
    Matrix x(4, 1);
    x << 0.0, 1.0, 2.1, 3.3;
    const KnnGraph graph = build_knn(PointCloud(x), 1);
    const EdgeSet edges = symmetrize(graph);
    // Directed: 0->1, 1->0, 2->1, 3->2 so undirected unique = (0,1), (1,2), (2,3).
    REQUIRE(edges.edges.size() == 3);
    CHECK(edges.edges[0] == std::pair<int, int>(0, 1));
    CHECK(edges.edges[1] == std::pair<int, int>(1, 2));
    CHECK(edges.edges[2] == std::pair<int, int>(2, 3));

    // Every directed edge appears in the symmetrized set.
    const Matrix y = testoracle::random_matrix(40, 3, 23, 2.0);
    const KnnGraph g2 = build_knn(PointCloud(y), 5);
    const EdgeSet e2 = symmetrize(g2);
    for (int i = 0; i < 40; ++i)
        for (int t = 0; t < 5; ++t) {
            const int j = g2.indices(i, t);
            const std::pair<int, int> key(std::min(i, j), std::max(i, j));
            CHECK(std::binary_search(e2.edges.begin(), e2.edges.end(), key));
        }
    for (std::size_t i = 1; i < e2.edges.size(); ++i) CHECK(e2.edges[i - 1] < e2.edges[i]);
}

TEST_CASE("save_knn_csv format") {
    Matrix x(3, 1);
    x << 0.0, 1.0, 3.0;
    const KnnGraph graph = build_knn(PointCloud(x), 2);
    const auto path =
        (std::filesystem::temp_directory_path() / "dimred_test_knn.csv").string();
    save_knn_csv(graph, path);
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    CHECK(line == "i,j,distance");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 6);
}
