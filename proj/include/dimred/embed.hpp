#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dimred/dataset.hpp"
#include "dimred/knn.hpp"

namespace dimred {

enum class EmbedMethod { random, pca, spectral, layout };

const char* embed_method_name(EmbedMethod m);

/// Low-dimensional image of a point cloud. `params` records the settings
/// that produced it (serialized into the JSON sidecar next to the CSV).
struct Embedding {
    Matrix coords;
    EmbedMethod method = EmbedMethod::random;
    int source_n = 0;
    std::map<std::string, std::string> params;

    Eigen::Index n() const { return coords.rows(); }
    Eigen::Index dim() const { return coords.cols(); }
};

/// Spectrum summary of a PCA run. epsilon satisfies
/// sum_{i<=k} sigma_i^2 = (1-epsilon)^2 * frobenius_norm^2.
struct PcaInfo {
    std::vector<double> singular_values;
    double epsilon = 0.0;
    double frobenius_norm = 0.0;
};

/// Summary of pairwise distance ratios |f(u)-f(v)| / |u-v| over sampled
/// distinct pairs. 1.0 everywhere means the map is an isometry on the
/// sample.
struct DistortionStats {
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    double std = 0.0;
    int n_pairs = 0;
};

/// Y = X * R with R (d x m) filled with i.i.d. N(0, 1/m) entries. Linear by
/// construction, so f(u) - f(v) = f(u - v) exactly.
Embedding random_projection(const PointCloud& cloud, int target_dim, Seed seed);

/// Classical PCA: center, take the top-k right singular vectors. Output
/// columns are orthogonal with norms sigma_1 >= ... >= sigma_k. Dense SVD
/// for d <= 2000, Gram-side eigendecomposition above that.
std::pair<Embedding, PcaInfo> pca_embedding(const PointCloud& cloud, int target_dim);

/// Laplacian eigenmap on the symmetrized kNN graph: eigenvectors of the
/// symmetric normalized Laplacian for the target_dim smallest nonzero
/// eigenvalues. Edge weights are exp(-d^2/bandwidth^2) when a bandwidth is
/// given, else 1. Disconnected graphs embed jointly; the component count is
/// reported on stderr and in params["n_components"].
Embedding spectral_embedding(const PointCloud& cloud, const KnnGraph& graph, int target_dim,
                             std::optional<double> kernel_bandwidth = std::nullopt);

/// Distance-ratio statistics over n_pairs distinct pairs sampled uniformly;
/// pairs with coincident source points are resampled.
DistortionStats distortion_stats(const PointCloud& cloud, const Embedding& embedding, int n_pairs,
                                 Seed seed);

/// Embedding CSV (one row per point, 17 significant digits, y0..y{m-1}
/// header), mirroring the dataset format.
void save_embedding_csv(const Embedding& embedding, const std::string& path);

} // namespace dimred
