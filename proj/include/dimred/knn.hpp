#pragma once

#include <utility>
#include <vector>

#include "dimred/dataset.hpp"

namespace dimred {

using IndexMatrix = Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Exact k-nearest-neighbor graph. Row i lists the k nearest points to i
/// (never i itself) with distances sorted ascending; ties broken by smaller
/// index.
struct KnnGraph {
    IndexMatrix indices;
    Matrix distances;
    int k = 0;
};

/// Undirected, deduplicated edge list with i < j per edge, sorted
/// lexicographically.
struct EdgeSet {
    std::vector<std::pair<int, int>> edges;
};

/// Exact Euclidean kNN by blocked brute force. Queries are processed in
/// blocks of block_size rows (parallel over blocks); the result is
/// independent of block_size and thread count.
KnnGraph build_knn(const PointCloud& cloud, int k, int block_size = 64, int n_threads = 0);

/// Converts the directed kNN relation into the undirected edge set:
/// (i,j) present iff j is a neighbor of i or i is a neighbor of j.
EdgeSet symmetrize(const KnnGraph& graph);

/// Debug dump: one "i,j,distance" row per directed neighbor pair.
void save_knn_csv(const KnnGraph& graph, const std::string& path);

} // namespace dimred
