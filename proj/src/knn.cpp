#include "dimred/knn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "dimred/error.hpp"
#include "dimred/parallel.hpp"

namespace dimred {

KnnGraph build_knn(const PointCloud& cloud, int k, int block_size, int n_threads) {
    const Eigen::Index n = cloud.n();
    if (n < 2) throw Error(ErrorCode::empty_dataset, "kNN needs at least 2 points");
    if (k < 1) throw Error(ErrorCode::invalid_param, "k must be >= 1");
    if (k > n - 1)
        throw Error(ErrorCode::k_too_large,
                    "k=" + std::to_string(k) + " exceeds n-1=" + std::to_string(n - 1));
    if (block_size < 1) block_size = 64;

    const Matrix& x = cloud.coords();
    KnnGraph graph;
    graph.k = k;
    graph.indices.resize(n, k);
    graph.distances.resize(n, k);

    // Each query row is computed independently, so the output is bitwise
    // identical for any block partition or thread count.
    const std::size_t n_blocks = static_cast<std::size_t>((n + block_size - 1) / block_size);
    parallel_for(n_blocks, n_threads, [&](std::size_t bb, std::size_t be) {
        std::vector<std::pair<double, int>> cand(static_cast<std::size_t>(n) - 1);
        for (std::size_t b = bb; b < be; ++b) {
            const Eigen::Index qb = static_cast<Eigen::Index>(b) * block_size;
            const Eigen::Index qe = std::min(qb + block_size, n);
            for (Eigen::Index i = qb; i < qe; ++i) {
                std::size_t m = 0;
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (j == i) continue;
                    cand[m++] = {(x.row(i) - x.row(j)).squaredNorm(), static_cast<int>(j)};
                }
                std::partial_sort(cand.begin(), cand.begin() + k, cand.end());
                for (int t = 0; t < k; ++t) {
                    graph.indices(i, t) = cand[static_cast<std::size_t>(t)].second;
                    graph.distances(i, t) = std::sqrt(cand[static_cast<std::size_t>(t)].first);
                }
            }
        }
    });
    return graph;
}

EdgeSet symmetrize(const KnnGraph& graph) {
    EdgeSet out;
    out.edges.reserve(static_cast<std::size_t>(graph.indices.rows()) *
                      static_cast<std::size_t>(graph.k));
    for (Eigen::Index i = 0; i < graph.indices.rows(); ++i) {
        for (int t = 0; t < graph.k; ++t) {
            const int j = graph.indices(i, t);
            const int a = std::min<int>(static_cast<int>(i), j);
            const int b = std::max<int>(static_cast<int>(i), j);
            out.edges.emplace_back(a, b);
        }
    }
    std::sort(out.edges.begin(), out.edges.end());
    out.edges.erase(std::unique(out.edges.begin(), out.edges.end()), out.edges.end());
    return out;
}

void save_knn_csv(const KnnGraph& graph, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::io_error, "cannot write " + path);
    out << "i,j,distance\n";
    char buf[64];
    for (Eigen::Index i = 0; i < graph.indices.rows(); ++i) {
        for (int t = 0; t < graph.k; ++t) {
            std::snprintf(buf, sizeof(buf), "%.17g", graph.distances(i, t));
            out << i << ',' << graph.indices(i, t) << ',' << buf << '\n';
        }
    }
}

} // namespace dimred
